//! Structured verification reports.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

/// Outcome of one named check.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    pub details: String,
    pub stats: BTreeMap<String, f64>,
}

impl Check {
    /// Pass when `ok`, otherwise fail with `details`.
    pub fn new(name: impl Into<String>, ok: bool, details: impl Into<String>) -> Self {
        let mut details = details.into();
        if !ok && details.is_empty() {
            details = "check failed".into();
        }
        Check {
            name: name.into(),
            status: if ok { Status::Pass } else { Status::Fail },
            details,
            stats: BTreeMap::new(),
        }
    }

    pub fn skip(name: impl Into<String>, details: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Skip,
            details: details.into(),
            stats: BTreeMap::new(),
        }
    }

    pub fn stat(mut self, key: &str, value: f64) -> Self {
        self.stats.insert(key.into(), value);
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Report {
    pub schema: u32,
    pub suite: String,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub checks: Vec<Check>,
    pub elapsed_ms: f64,
}

impl Report {
    pub fn new(suite: impl Into<String>, seed: u64) -> Self {
        Report {
            schema: SCHEMA_VERSION,
            suite: suite.into(),
            seed,
            tolerances: BTreeMap::new(),
            checks: Vec::new(),
            elapsed_ms: 0.0,
        }
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.into(), value);
        self
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
        for (k, v) in other.tolerances {
            self.tolerances.entry(k).or_insert(v);
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "suite {} (seed {})", self.suite, self.seed)?;
        for c in &self.checks {
            let tag = match c.status {
                Status::Pass => "PASS",
                Status::Fail => "FAIL",
                Status::Skip => "SKIP",
            };
            write!(f, "  [{tag}] {}", c.name)?;
            if !c.details.is_empty() {
                write!(f, ": {}", c.details)?;
            }
            writeln!(f)?;
        }
        let failed = self.failures().count();
        write!(
            f,
            "{} checks, {} failed, {:.0} ms",
            self.checks.len(),
            failed,
            self.elapsed_ms
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn failing_checks_carry_details() {
        let c = Check::new("x", false, "");
        assert_eq!(c.status, Status::Fail);
        assert!(!c.details.is_empty());
        let mut r = Report::new("t", 3);
        r.push(Check::new("a", true, ""));
        assert!(r.passed());
        r.push(c);
        assert!(!r.passed());
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains("\"schema\":1"));
        assert!(text.contains("\"status\":\"fail\""));
    }
}

//! Runs one verification suite and prints its JSON report.

use fibrate::suites::{run_suite, Suite, SuiteConfig};

fn main() {
    let suite: Suite = std::env::args()
        .nth(1)
        .as_deref()
        .unwrap_or("ocs")
        .parse()
        .unwrap_or_else(|e| {
            eprintln!("{e}");
            std::process::exit(2);
        });
    let cfg = SuiteConfig {
        trials: 50,
        ..SuiteConfig::default()
    };
    let report = run_suite(suite, &cfg);
    println!(
        "{}",
        serde_json::to_string_pretty(&report).expect("reports serialize")
    );
    std::process::exit(if report.passed() { 0 } else { 1 });
}

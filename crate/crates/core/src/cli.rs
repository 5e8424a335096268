//! Command-line driver.
//!
//! Exit codes: 0 success, 1 a check failed or a computation was refused,
//! 2 bad flags or malformed input.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Error;
use crate::exterior::{darboux_decompose, Bivector};
use crate::gcfib::{fiber, fibration_sign, verify_fibration, Fibration};
use crate::numkern::{from_integer, integer_matmul, to_integer, MatrixJson, Sign, Vector};
use crate::ocs::{
    agreement_space, chart_pairs, paired_bases, random_ocs, sign, ComplexStructure, Mode,
};
use crate::quat::{
    counterexample_pair, counterexample_q, fiber4, fibers_agree, nonuniqueness_pair,
    nonuniqueness_report, quat_sign, s3_counterexample, QuatStructure, PLANE4_TOL,
};
use crate::report::{Check, Report};
use crate::suites::{run_suite, Suite, SuiteConfig};

#[derive(Parser, Debug)]
#[command(
    name = "fibrate",
    version,
    about = "Great-circle and great-sphere fibration toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Orthogonal complex structures.
    #[command(subcommand)]
    Ocs(OcsCommand),
    /// Great-circle fibrations of S^3.
    #[command(subcommand)]
    Fib(FibCommand),
    /// Quaternionic structures and fibrations of S^7 by 3-spheres.
    #[command(subcommand)]
    Quat(QuatCommand),
    /// Darboux normal form of a bivector.
    Darboux {
        /// Bivector JSON file: {"coords": [a12, a13, a14, a23, a24, a34]}.
        #[arg(long)]
        alpha: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Reproduce an explicit example and check every stated equality.
    Counterexample {
        which: Which,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct Output {
    /// Write JSON here instead of standard output.
    #[arg(short = 'o', long = "output")]
    path: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SeedArg {
    #[arg(long, env = "FIBRATE_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[arg(value_parser = parse_suite)]
    suite: Suite,
    #[arg(long, default_value_t = 300, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    #[command(flatten)]
    seed: SeedArg,
    /// Tolerance for the generic equality checks.
    #[arg(long, default_value_t = 1e-9, value_parser = parse_tol)]
    tol: f64,
    /// Write the JSON report here; otherwise print a summary.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum OcsCommand {
    /// Seeded random structure of the given sign.
    Random {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, value_parser = parse_sign, allow_hyphen_values = true)]
        sign: Sign,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Sign of a structure.
    Sign {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
    /// Kernel of J − K (difference) or J + K (sum).
    Agree {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_enum, default_value_t = ModeArg::Difference)]
        mode: ModeArg,
        #[command(flatten)]
        out: Output,
    },
    /// Paired bases adapted to J and K through a point.
    PairBases {
        j: PathBuf,
        k: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Point,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Difference,
    Sum,
}

#[derive(Subcommand, Debug)]
enum FibCommand {
    /// Fiber through a point.
    Lookup {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Point,
        #[command(flatten)]
        out: Output,
    },
    /// Coverage, disjointness and sign stability on sampled points.
    Check {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
        samples: u64,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
    /// Sign of the fibration.
    Sign {
        #[arg(long)]
        spec: PathBuf,
        #[command(flatten)]
        seed: SeedArg,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Subcommand, Debug)]
enum QuatCommand {
    /// The opposite-sign pair on R^8 with no common oriented fiber.
    Counterexample {
        #[command(flatten)]
        out: Output,
    },
    /// Compare the fibers of two structures through a point.
    Agree {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        point: Point,
        #[command(flatten)]
        out: Output,
    },
    /// Sign of a quaternionic structure.
    Sign {
        file: PathBuf,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Which {
    S7Nonexistence,
    S7Nonuniqueness,
    ChartN3,
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse()
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if t.is_finite() && t > 0.0 {
        Ok(t)
    } else {
        Err("tolerance must be a positive number".into())
    }
}

fn parse_sign(s: &str) -> Result<Sign, String> {
    match s {
        "1" | "+1" | "+" | "positive" => Ok(Sign::Positive),
        "-1" | "-" | "negative" => Ok(Sign::Negative),
        _ => Err("expected +1 or -1".into()),
    }
}

/// Comma-separated coordinates.
#[derive(Clone, Debug)]
struct Point(Vec<f64>);

fn parse_point(s: &str) -> Result<Point, String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("`{x}`: {e}")))
        .collect::<Result<_, _>>()?;
    if v.iter().any(|x| !x.is_finite()) {
        return Err("coordinates must be finite".into());
    }
    Ok(Point(v))
}

/// Outcome carrying the exit code.
#[derive(Debug)]
enum Failure {
    Input(String),
    Refused(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Schema { .. }
            | Error::Json(_)
            | Error::DimensionMismatch { .. }
            | Error::NotUnitNorm { .. }
            | Error::NonFinite => Failure::Input(e.to_string()),
            other => Failure::Refused(other.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn load<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        if field == "." {
            Failure::Input(format!("{}: {inner}", path.display()))
        } else {
            Failure::Input(format!("{}: field `{field}`: {inner}", path.display()))
        }
    })
}

fn emit<T: Serialize>(value: &T, out: &Output) -> Result<(), Failure> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| Failure::Refused(e.to_string()))?;
    text.push('\n');
    match &out.path {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn unit_point(p: &Point, dim: usize) -> Result<Vector, Failure> {
    let v = &p.0;
    if v.len() != dim {
        return Err(Failure::Input(format!(
            "--point needs {dim} coordinates, got {}",
            v.len()
        )));
    }
    let x = Vector::from_row_slice(v);
    let norm = x.norm();
    if norm == 0.0 {
        return Err(Failure::Input("--point must be nonzero".into()));
    }
    Ok(x / norm)
}

/// Parses arguments from the process and returns the exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    run(cli)
}

pub fn run(cli: Cli) -> i32 {
    let outcome = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Ocs(c) => ocs(c),
        Command::Fib(c) => fib(c),
        Command::Quat(c) => quat(c),
        Command::Darboux { alpha, out } => darboux(&alpha, &out),
        Command::Counterexample { which, out } => counterexample(which, &out),
    };
    match outcome {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(Failure::Refused(m)) => {
            eprintln!("error: {m}");
            1
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            2
        }
    }
}

fn verify(a: VerifyArgs) -> Outcome {
    let cfg = SuiteConfig {
        trials: a.trials as usize,
        seed: a.seed.seed,
        tol: a.tol,
    };
    let report = run_suite(a.suite, &cfg);
    match &a.json {
        Some(path) => emit(
            &report,
            &Output {
                path: Some(path.clone()),
            },
        )?,
        None => println!("{report}"),
    }
    Ok(report.passed())
}

fn ocs(c: OcsCommand) -> Outcome {
    match c {
        OcsCommand::Random {
            n,
            sign: s,
            seed,
            out,
        } => {
            emit(&random_ocs(n as usize, s, seed.seed), &out)?;
        }
        OcsCommand::Sign { file, out } => {
            let j: ComplexStructure = load(&file)?;
            emit(&json!({ "sign": sign(&j)? }), &out)?;
        }
        OcsCommand::Agree { a, b, mode, out } => {
            let j: ComplexStructure = load(&a)?;
            let k: ComplexStructure = load(&b)?;
            let mode = match mode {
                ModeArg::Difference => Mode::Difference,
                ModeArg::Sum => Mode::Sum,
            };
            let ker = agreement_space(&j, &k, mode)?;
            let basis: Vec<Vec<f64>> = ker
                .basis
                .iter()
                .map(|v| v.iter().copied().collect())
                .collect();
            emit(
                &json!({
                    "dimension": ker.dimension,
                    "basis": basis,
                    "mod4": ker.dimension % 4,
                }),
                &out,
            )?;
        }
        OcsCommand::PairBases { j, k, point, out } => {
            let j: ComplexStructure = load(&j)?;
            let k: ComplexStructure = load(&k)?;
            let p = unit_point(&point, j.dim())?;
            let pb = paired_bases(&j, &k, &p)?;
            let mut v = serde_json::to_value(&pb).map_err(Error::from)?;
            v["pattern_residual"] = json!(pb.pattern_residual());
            v["circle_residual"] = json!(pb.circle_residual());
            emit(&v, &out)?;
        }
    }
    Ok(true)
}

fn check_hopf_dim(f: &Fibration) -> Result<(), Failure> {
    if f.dim() != 4 {
        return Err(Failure::Input(format!(
            "field `J`: expected a 4x4 structure, got {0}x{0}",
            f.dim()
        )));
    }
    Ok(())
}

fn fib(c: FibCommand) -> Outcome {
    match c {
        FibCommand::Lookup { spec, point, out } => {
            let f: Fibration = load(&spec)?;
            check_hopf_dim(&f)?;
            let x = unit_point(&point, 4)?;
            let plane = fiber(&f, &x)?;
            emit(
                &json!({
                    "point": x.as_slice(),
                    "plane": plane,
                    "containment_residual": plane.containment_residual(&x),
                }),
                &out,
            )?;
        }
        FibCommand::Check {
            spec,
            samples,
            seed,
            out,
        } => {
            let f: Fibration = load(&spec)?;
            check_hopf_dim(&f)?;
            let report = verify_fibration(&f, samples as usize, seed.seed);
            emit(&report, &out)?;
            return Ok(report.passed());
        }
        FibCommand::Sign { spec, seed, out } => {
            let f: Fibration = load(&spec)?;
            check_hopf_dim(&f)?;
            emit(&json!({ "sign": fibration_sign(&f, seed.seed)? }), &out)?;
        }
    }
    Ok(true)
}

fn quat(c: QuatCommand) -> Outcome {
    match c {
        QuatCommand::Counterexample { out } => {
            let (plus, minus) = counterexample_pair();
            let report = s3_counterexample();
            emit(
                &json!({ "plus": plus, "minus": minus, "report": report }),
                &out,
            )?;
            Ok(report.passed())
        }
        QuatCommand::Agree { a, b, point, out } => {
            let q1: QuatStructure = load(&a)?;
            let q2: QuatStructure = load(&b)?;
            let p = unit_point(&point, q1.dim())?;
            let agreement = fibers_agree(&q1, &q2, &p, PLANE4_TOL)?;
            let distance = fiber4(&q1, &p)?.distance(&fiber4(&q2, &p)?);
            emit(
                &json!({ "agreement": agreement, "projector_distance": distance }),
                &out,
            )?;
            Ok(true)
        }
        QuatCommand::Sign { file, out } => {
            let q: QuatStructure = load(&file)?;
            emit(&json!({ "sign": quat_sign(&q)? }), &out)?;
            Ok(true)
        }
    }
}

fn darboux(alpha: &Path, out: &Output) -> Outcome {
    let a: Bivector = load(alpha)?;
    if !a.is_finite() {
        return Err(Failure::Input(
            "field `coords`: entries must be finite".into(),
        ));
    }
    let d = darboux_decompose(&a);
    let error = (d.reconstruct() - a).max_abs();
    emit(
        &json!({
            "a": d.a,
            "b": d.b,
            "P": d.p,
            "Q": d.q,
            "reconstruction_error": error,
        }),
        out,
    )?;
    Ok(true)
}

fn counterexample(which: Which, out: &Output) -> Outcome {
    let (value, report): (Value, Report) = match which {
        Which::S7Nonexistence => {
            let q = counterexample_q();
            let plus = crate::quat::standard_quat(2);
            let sums: Vec<Value> = ["I", "J", "K"]
                .iter()
                .zip(plus.factors())
                .map(|(name, f)| {
                    let l = to_integer(f.matrix()).expect("standard structure is integral");
                    let a = integer_matmul(&q, &l);
                    let b = integer_matmul(&l, &q);
                    let sum: Vec<Vec<i64>> = a
                        .iter()
                        .zip(&b)
                        .map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + v).collect())
                        .collect();
                    json!({ "name": format!("Q{name}+{name}Q"), "matrix": MatrixJson::from(&from_integer(&sum)) })
                })
                .collect();
            let report = s3_counterexample();
            (
                json!({ "Q": MatrixJson::from(&from_integer(&q)), "sums": sums }),
                report,
            )
        }
        Which::S7Nonuniqueness => {
            let (one, two) = nonuniqueness_pair();
            (
                json!({ "first": one, "second": two }),
                nonuniqueness_report(),
            )
        }
        Which::ChartN3 => {
            let mut report = Report::new("chart-n3", 0);
            let mut entries = Vec::new();
            for entry in chart_pairs().into_iter().filter(|e| e.j.n() == 3) {
                let got =
                    agreement_space(&entry.j, &entry.k, Mode::Difference).map(|k| k.dimension);
                let ok = matches!(got, Ok(d) if d == entry.expected_dimension);
                report.push(Check::new(
                    format!("dim ker(J-K), {}", entry.label),
                    ok,
                    format!("got {got:?}, expected {}", entry.expected_dimension),
                ));
                entries.push(json!({
                    "label": entry.label,
                    "J": entry.j,
                    "K": entry.k,
                    "dimension": got.ok(),
                }));
            }
            (json!({ "entries": entries }), report)
        }
    };
    let passed = report.passed();
    emit(
        &json!({ "example": value, "report": report, "passed": passed }),
        out,
    )?;
    Ok(passed)
}

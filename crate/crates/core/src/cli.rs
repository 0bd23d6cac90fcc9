//! Command-line front end. Every command prints one JSON document carrying
//! `"schema": 1`. Exit codes: 0 success, 1 bad input or model, 2 a fixture
//! failed verification.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bounds_engine::{absorbing_sets, compute_bounds_with_profile, structure_conditions_check};
use crate::fixtures;
use crate::levy_model::BivariateTriplet;
use crate::model_file::load_model;
use crate::quadrant_thresholds::{ordering_violations, theta_profile};
use crate::ruin_classifier::{classify as classify_ruin, z_infinity_support};
use crate::simulator::{
    simulate_summaries, Execution, ExtremesEstimate, PathSummary, RuinEstimate, Scheme, SimConfig, DEFAULT_HORIZON,
    DEFAULT_PATHS,
};

pub const SCHEMA: u32 = 1;
pub const EXIT_OK: i32 = 0;
pub const EXIT_MODEL: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "gou-ruin", version, about = "Ruin analysis for generalised Ornstein-Uhlenbeck processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ModelArg {
    /// JSON model file.
    model: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Quadrant thresholds θ₁..θ₄ and θ₁′..θ₄′.
    Thetas(ModelArg),
    /// L*, U*, L, U, degeneracy and the structure taxonomy.
    Bounds(ModelArg),
    /// Ruin regime of ψ(z) over z ≥ 0.
    Classify(ModelArg),
    /// Monte Carlo ruin and extremes estimates.
    Simulate(SimulateArgs),
    /// Recompute every embedded fixture and compare with its expectations.
    VerifyExamples(VerifyArgs),
}

#[derive(Debug, Args)]
struct SimulateArgs {
    model: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    #[arg(long, default_value_t = DEFAULT_HORIZON)]
    horizon: f64,
    #[arg(long, default_value_t = DEFAULT_PATHS)]
    paths: usize,
    /// Step size; selects the Euler scheme.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Per-path CSV: ruin_time (or NA), min, max, terminal_v, terminal_z.
    #[arg(long)]
    out_csv: Option<PathBuf>,
    /// Run paths on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Also write each fixture model and its expectations to DIR.
    #[arg(long, value_name = "DIR")]
    export: Option<PathBuf>,
    /// Skip the short simulation checks.
    #[arg(long)]
    no_sim: bool,
}

struct Failure {
    code: i32,
    message: String,
}

fn model_failure(e: impl std::fmt::Display) -> Failure {
    Failure { code: EXIT_MODEL, message: e.to_string() }
}

fn envelope(command: &str, body: Value) -> Value {
    let mut v = json!({ "schema": SCHEMA, "command": command });
    if let (Value::Object(dst), Value::Object(src)) = (&mut v, body) {
        dst.extend(src);
    }
    v
}

fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).expect("report serialisation")
}

fn load(path: &Path) -> Result<BivariateTriplet, Failure> {
    load_model(path).map_err(|e| model_failure(format!("{}: {e}", path.display())))
}

fn thetas(path: &Path) -> Result<Value, Failure> {
    let t = load(path)?;
    let p = theta_profile(&t);
    Ok(envelope(
        "thetas",
        json!({ "model": path.display().to_string(), "profile": to_value(&p), "ordering_violations": ordering_violations(&p) }),
    ))
}

fn bounds(path: &Path) -> Result<Value, Failure> {
    let t = load(path)?;
    let p = theta_profile(&t);
    let b = compute_bounds_with_profile(&t, &p);
    let absorbing = match absorbing_sets(&b) {
        Ok(sets) => to_value(&sets),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(envelope(
        "bounds",
        json!({
            "model": path.display().to_string(),
            "report": to_value(&b),
            "absorbing_sets": absorbing,
            "structure": to_value(&structure_conditions_check(&t)),
        }),
    ))
}

fn classify(path: &Path) -> Result<Value, Failure> {
    let t = load(path)?;
    let (b, r) = classify_ruin(&t);
    let zinf = match z_infinity_support(&t, &b) {
        Ok(s) => to_value(&s),
        Err(e) => json!({ "error": e.to_string() }),
    };
    Ok(envelope(
        "classify",
        json!({
            "model": path.display().to_string(),
            "regime": to_value(&r),
            "L": to_value(&b.l),
            "U": to_value(&b.u),
            "z_infinity_support": zinf,
        }),
    ))
}

fn write_csv(path: &Path, rows: &[PathSummary]) -> Result<(), Failure> {
    let io = |e: csv::Error| model_failure(format!("{}: {e}", path.display()));
    let mut w = csv::Writer::from_path(path).map_err(io)?;
    w.write_record(["ruin_time", "min", "max", "terminal_v", "terminal_z"]).map_err(io)?;
    for r in rows {
        let ruin = r.ruin_time.map_or_else(|| "NA".to_string(), |t| t.to_string());
        w.write_record([
            ruin,
            r.min.to_string(),
            r.max.to_string(),
            r.terminal_v.to_string(),
            r.terminal_z.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| model_failure(format!("{}: {e}", path.display())))
}

fn simulate(a: &SimulateArgs) -> Result<Value, Failure> {
    let t = load(&a.model)?;
    let config = SimConfig {
        z: a.z,
        horizon: a.horizon,
        paths: a.paths,
        seed: a.seed,
        scheme: a.dt.map_or(Scheme::ExactJumpDrift, |dt| Scheme::EulerMaruyama { dt }),
        execution: if a.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    let rows = simulate_summaries(&t, &config).map_err(model_failure)?;
    if let Some(p) = &a.out_csv {
        write_csv(p, &rows)?;
    }
    Ok(envelope(
        "simulate",
        json!({
            "model": a.model.display().to_string(),
            "config": to_value(&config),
            "ruin": to_value(&RuinEstimate::from_summaries(&config, &rows)),
            "extremes": to_value(&ExtremesEstimate::from_summaries(&config, &rows)),
            "csv": a.out_csv.as_ref().map(|p| p.display().to_string()),
        }),
    ))
}

fn verify(a: &VerifyArgs) -> Result<(Value, bool), Failure> {
    let exported = match &a.export {
        Some(dir) => {
            Some(fixtures::export(dir).map_err(|e| model_failure(format!("export to {}: {e}", dir.display())))?)
        }
        None => None,
    };
    let reports = fixtures::verify_examples(!a.no_sim);
    let all_pass = reports.iter().all(|r| r.pass);
    let table: Vec<Value> = reports
        .iter()
        .map(|r| {
            json!({
                "name": r.name,
                "pass": r.pass,
                "checks": r.checks.len(),
                "failures": to_value(&r.failures().collect::<Vec<_>>()),
            })
        })
        .collect();
    Ok((
        envelope(
            "verify-examples",
            json!({
                "pass": all_pass,
                "fixtures": table,
                "exact_tolerance": fixtures::EXACT_TOL,
                "approx_tolerance": fixtures::APPROX_TOL,
                "exported": exported,
            }),
        ),
        all_pass,
    ))
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut impl Write, err: &mut impl Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_MODEL } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Thetas(m) => thetas(&m.model).map(|v| (v, true)),
        Command::Bounds(m) => bounds(&m.model).map(|v| (v, true)),
        Command::Classify(m) => classify(&m.model).map(|v| (v, true)),
        Command::Simulate(a) => simulate(a).map(|v| (v, true)),
        Command::VerifyExamples(a) => verify(a),
    };
    match result {
        Ok((v, pass)) => {
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("json"));
            if pass {
                EXIT_OK
            } else {
                EXIT_VERIFY
            }
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use askey_core::quadrature::CorollaryId;
use askey_core::record::Outcome;
use askey_core::C64;
use askey_harness::parse::{parse_complex, parse_real};
use askey_harness::verify::{self, RunConfig, Suite};
use askey_harness::{catalog, eval_polynomial, integrate_one, EvalParams, FamilyName};
use clap::{Args, Parser, Subcommand};

/// Verification harness for continuous Askey-scheme polynomial identities.
#[derive(Parser)]
#[command(name = "askey", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run identity, corollary and property suites.
    Verify(VerifyArgs),
    /// Evaluate one polynomial.
    Eval(EvalArgs),
    /// List identity tags, corollary tags and property names.
    List,
    /// Check one orthogonality-integral corollary.
    Integrate(IntegrateArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long, value_enum, default_values_t = [Suite::All])]
    suite: Vec<Suite>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Parameter draws per identity and corollary.
    #[arg(long, default_value_t = 5)]
    trials: usize,
    #[arg(long, default_value = "1e-8", value_parser = parse_real)]
    tol: f64,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    include: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<String>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(value_enum)]
    family: FamilyName,
    #[arg(long)]
    n: usize,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_real)]
    x: f64,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    a: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    b: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    c: Option<C64>,
    #[arg(long, allow_hyphen_values = true, value_parser = parse_complex)]
    d: Option<C64>,
    #[arg(long, value_parser = parse_real)]
    lambda: Option<f64>,
    #[arg(long, value_parser = parse_real)]
    phi: Option<f64>,
}

#[derive(Args)]
struct IntegrateArgs {
    /// Corollary tag, e.g. iw1.
    id: String,
    #[arg(long, default_value_t = 0)]
    k: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true, value_parser = parse_complex)]
    rho: C64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long, default_value = "1e-6", value_parser = parse_real)]
    tol: f64,
    /// JSON file with explicit corollary input; overrides the seeded draw.
    #[arg(long)]
    input: Option<PathBuf>,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("askey: {msg}");
    ExitCode::from(2)
}

fn cmd_verify(args: VerifyArgs) -> ExitCode {
    let cfg = RunConfig {
        suites: args.suite,
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
        report_path: args.report,
        include: args.include,
        exclude: args.exclude,
    };
    let report = match verify::run(&cfg) {
        Ok(r) => r,
        Err(e) => return config_error(e),
    };
    for r in report.records.iter().filter(|r| r.outcome == Outcome::Fail) {
        let k = r.inputs.k.map(|k| format!(" k={k}")).unwrap_or_default();
        let err = r.rel_err.map(|e| format!(" rel_err={e:.3e}")).unwrap_or_default();
        let why = r.reason.as_deref().map(|s| format!(" ({s})")).unwrap_or_default();
        println!("FAIL {:?} {} trial={}{k}{err} tol={:e}{why}", r.kind, r.tag, r.trial, r.tol);
    }
    let s = &report.summary;
    println!("{} records: {} passed, {} failed, {} skipped", s.total, s.passed, s.failed, s.skipped);
    if let Some(path) = &cfg.report_path {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return config_error(format!("cannot write {}: {e}", path.display()));
        }
    }
    ExitCode::from(report.exit_code() as u8)
}

fn cmd_eval(args: EvalArgs) -> ExitCode {
    let p = EvalParams { a: args.a, b: args.b, c: args.c, d: args.d, lambda: args.lambda, phi: args.phi };
    match eval_polynomial(args.family, args.n, args.x, &p) {
        Ok(s) => {
            println!("{s}");
            ExitCode::SUCCESS
        }
        Err(e) => config_error(e),
    }
}

fn cmd_integrate(args: IntegrateArgs) -> ExitCode {
    let id: CorollaryId = match args.id.parse() {
        Ok(id) => id,
        Err(e) => return config_error(e),
    };
    if !(args.tol > 0.0) {
        return config_error("tol must be positive");
    }
    let input = match &args.input {
        None => None,
        Some(path) => match std::fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|s| serde_json::from_str(&s).map_err(|e| e.to_string())) {
            Ok(inp) => Some(inp),
            Err(e) => return config_error(format!("cannot read {}: {e}", path.display())),
        },
    };
    match integrate_one(id, args.k, args.rho, args.seed, args.trial, args.tol, input) {
        Ok(rec) => {
            println!("{}", serde_json::to_string_pretty(&rec).expect("record serializes"));
            ExitCode::from(if rec.outcome == Outcome::Fail { 1 } else { 0 })
        }
        Err(e) => config_error(e),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Verify(a) => cmd_verify(a),
        Command::Eval(a) => cmd_eval(a),
        Command::List => {
            print!("{}", catalog());
            ExitCode::SUCCESS
        }
        Command::Integrate(a) => cmd_integrate(a),
    }
}

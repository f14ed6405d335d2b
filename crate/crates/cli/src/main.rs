//! `varexp`: variable-exponent sequence space computations with JSON in and out.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use commands::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(name = "varexp", version, about = "Modulars, Luxemburg norms and isometry checks on variable-exponent sequence spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON input: a file path, `-` for stdin, or an inline object.
    #[arg(short, long, global = true)]
    pub input: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Solver tolerance for `norm`, isometry tolerance for `check-op`.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Truncation size or example length.
    #[arg(long, global = true)]
    pub n: Option<usize>,
    /// Omit the timestamp and timings so identical runs give identical bytes.
    #[arg(long, global = true)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Clarkson,
    Orthogonality,
    Structure,
    ShiftDichotomy,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleId {
    #[value(name = "41")]
    Shift,
    #[value(name = "42")]
    Transpositions,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Luxemburg norm of `a` under `p`.
    Norm,
    /// Modular `sum |a_n|^{p_n}`.
    Modular,
    /// Four-modular gap `rho(a+b) + rho(a-b) - 2 rho(a) - 2 rho(b)`.
    Clarkson,
    /// Apply an operator to `x`.
    Apply,
    /// Isomodularity certificate and randomized isometry check.
    CheckOp,
    /// Recover `(T, h)` from an isomodular operator.
    Recover,
    /// Exact isometry decision for an injection-induced operator.
    ThetaCheck,
    /// Run a verification suite.
    Suite { name: SuiteName },
    /// Reproduce one of the harmonic-series examples.
    Example { id: ExampleId },
    /// Search for isometric operators that are not isomodular.
    Explore,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Norm => "norm",
            Command::Modular => "modular",
            Command::Clarkson => "clarkson",
            Command::Apply => "apply",
            Command::CheckOp => "check-op",
            Command::Recover => "recover",
            Command::ThetaCheck => "theta-check",
            Command::Suite { .. } => "suite",
            Command::Example { .. } => "example",
            Command::Explore => "explore",
        }
    }
}

fn dispatch(command: &Command, common: &Common, input: Option<Value>) -> Result<Outcome, CliError> {
    match command {
        Command::Norm => commands::norm(common, input),
        Command::Modular => commands::modular(input),
        Command::Clarkson => commands::clarkson(input),
        Command::Apply => commands::apply(input),
        Command::CheckOp => commands::check_op(common, input),
        Command::Recover => commands::recover(input),
        Command::ThetaCheck => commands::theta_check(common, input),
        Command::Suite { name } => commands::suite(*name, common, input),
        Command::Example { id } => commands::example(*id, common),
        Command::Explore => commands::explore(common, input),
    }
}

fn envelope(command: &str, input: Option<Value>, result: Map<String, Value>, deterministic: bool) -> Value {
    let mut out = Map::new();
    out.insert("tool".into(), json!("varexp"));
    out.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    out.insert("command".into(), json!(command));
    if let Some(input) = input {
        out.insert("input".into(), input);
    }
    out.extend(result);
    if !deterministic {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        out.insert("timestamp".into(), json!(now));
    }
    Value::Object(out)
}

fn error_object(kind: &str, message: &str) -> String {
    json!({"tool": "varexp", "error": {"kind": kind, "message": message}}).to_string()
}

fn run() -> Result<ExitCode, CliError> {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return Ok(ExitCode::SUCCESS);
        }
        Err(e) => {
            let text = e.to_string();
            return Err(CliError::usage(text.trim_start_matches("error: ").trim_end()));
        }
    };
    let common = &cli.common;
    if let Some(tol) = common.tol {
        if !(tol.is_finite() && tol > 0.0) {
            return Err(CliError::usage(format!("--tol must be positive and finite, got {tol}")));
        }
    }
    let input = common.input.as_deref().map(commands::read_input).transpose()?;
    let outcome = dispatch(&cli.command, common, input.clone())?;
    let text = envelope(cli.command.name(), input, outcome.result, common.deterministic).to_string();
    match &common.output {
        Some(path) => std::fs::write(path, format!("{text}\n"))
            .map_err(|e| CliError::io(format!("cannot write {}: {e}", path.display())))?,
        None => println!("{text}"),
    }
    if !outcome.passed {
        eprintln!("verification failures reported");
    }
    Ok(if outcome.passed { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            println!("{}", error_object(e.kind, &e.message));
            ExitCode::from(2)
        }
    }
}

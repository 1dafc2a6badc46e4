//! The `pdqp-bench` command line.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use super::budget::budget_scaling;
use super::experiment::{estimate_success, ExperimentSpec, OutputFormat};
use super::output::{render_bounds, render_report, render_rows};
use super::verify::{verify_all, Suite, VerifyOptions};
use crate::adversary::{compute_bounds, DEFAULT_EPSILON};
use crate::algorithms::Model;
use crate::error::Error;
use crate::problems::ProblemKind;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "pdqp-bench", version, about = "Simulate query algorithms with non-collapsing measurements and copies, and check lower bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate the success rate of the implemented algorithm at one N.
    Run(ExperimentArgs),
    /// Like `run`, over every N given.
    Sweep(ExperimentArgs),
    /// Lower bounds from the adversary relation.
    Bound(BoundArgs),
    /// Smallest P reaching the target success rate, per N, with a log-log fit.
    MinimalP(ExperimentArgs),
    /// Run the property suites.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Default)]
pub struct ExperimentArgs {
    #[arg(long, value_enum)]
    pub problem: Option<ProblemKind>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    /// One or more input sizes, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub q: Option<usize>,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub target: Option<f64>,
    #[arg(long, value_enum)]
    pub out: Option<OutputFormat>,
    /// JSON file with experiment fields; flags given on the command line win.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    #[command(flatten)]
    pub common: ExperimentArgs,
    /// Error probability ε.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    pub epsilon: f64,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    /// Comma-separated suite names; an empty string selects none. Default: all.
    #[arg(long)]
    pub suites: Option<String>,
    /// Replace the collapse reweighting by unit weights.
    #[arg(long)]
    pub mutate_reweight: bool,
    #[arg(long, value_enum)]
    pub out: Option<OutputFormat>,
}

enum Failure {
    Usage(String),
    Violation(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::BudgetCapReached { .. } => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

impl ExperimentArgs {
    /// The config file (if any) with every given flag applied on top.
    pub fn resolve(&self) -> Result<ExperimentSpec, Error> {
        let mut spec = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Error::InvalidParameters(format!("{}: {e}", path.display())))?;
                serde_json::from_str(&text)
                    .map_err(|e| Error::InvalidParameters(format!("{}: {e}", path.display())))?
            }
            None => ExperimentSpec::default(),
        };
        if let Some(v) = self.problem {
            spec.problem = v;
        }
        if let Some(v) = self.model {
            spec.model = v;
        }
        if !self.n.is_empty() {
            spec.n = self.n.clone();
        }
        if self.q.is_some() {
            spec.q = self.q;
        }
        if self.p.is_some() {
            spec.p = self.p;
        }
        if let Some(v) = self.trials {
            spec.trials = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.target {
            spec.target = v;
        }
        if let Some(v) = self.out {
            spec.out = v;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn parse_suites(list: Option<&str>) -> Result<Vec<Suite>, Failure> {
    match list {
        None => Ok(Suite::ALL.to_vec()),
        Some(s) => s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|t| Suite::from_str(t, true).map_err(|_| Failure::Usage(format!("unknown suite `{t}`"))))
            .collect(),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    let mut emit = |text: String| {
        out.write_all(text.as_bytes())
            .map_err(|e| Failure::Usage(format!("write failed: {e}")))
    };
    match command {
        Command::Run(args) => {
            let spec = args.resolve()?;
            if spec.n.len() != 1 {
                return Err(Failure::Usage("`run` takes a single N; use `sweep` for several".into()));
            }
            rows_command(&spec, &mut emit)
        }
        Command::Sweep(args) => rows_command(&args.resolve()?, &mut emit),
        Command::MinimalP(args) => {
            let spec = args.resolve()?;
            let (rows, fit) = budget_scaling(&spec)?;
            emit(render_rows(&rows, fit.as_ref(), spec.out)?)
        }
        Command::Bound(args) => {
            let spec = args.common.resolve()?;
            let reports = spec
                .n
                .iter()
                .map(|&n| compute_bounds(spec.problem, n, spec.model, args.epsilon))
                .collect::<Result<Vec<_>, _>>()?;
            emit(render_bounds(&reports, spec.out)?)
        }
        Command::Verify(args) => {
            let options = VerifyOptions {
                seed: args.seed.unwrap_or(0),
                suites: parse_suites(args.suites.as_deref())?,
                mutate_reweight: args.mutate_reweight,
            };
            let report = verify_all(&options)?;
            emit(render_report(&report, args.out.unwrap_or_default())?)?;
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<String> = report
                    .suites
                    .iter()
                    .filter(|s| !s.passed())
                    .map(|s| format!("{:?}", s.suite))
                    .collect();
                Err(Failure::Violation(format!("failed suites: {}", failed.join(", "))))
            }
        }
    }
}

fn rows_command(spec: &ExperimentSpec, emit: &mut dyn FnMut(String) -> Result<(), Failure>) -> Result<(), Failure> {
    let rows = estimate_success(spec)?;
    emit(render_rows(&rows, None, spec.out)?)?;
    let below: Vec<String> = rows
        .iter()
        .filter(|r| r.worst_rate < spec.target)
        .map(|r| format!("N={} worst-class rate {} < {}", r.n, r.worst_rate, spec.target))
        .collect();
    if below.is_empty() {
        Ok(())
    } else {
        Err(Failure::Violation(below.join("; ")))
    }
}

/// Parses `args`, writes results to `out` and messages to stderr, and returns the exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Violation(msg)) => {
            eprintln!("violation: {msg}");
            EXIT_VIOLATION
        }
    }
}

//! The `pivotal` command line tool.
//!
//! CSV files are comma separated with a header row and `.` decimals. Row
//! indices are 0-based. Exit codes: 0 success, 2 usage or format error,
//! 3 domain error (for instance probabilities outside `[0, 1]`).

mod commands;
mod table;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::Error;

pub use table::Table;

#[derive(Debug, Parser)]
#[command(
    name = "pivotal",
    version,
    about = "Local pivotal method sampling and variance reduction"
)]
pub struct Cli {
    /// Seed for every random stream used by the command.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
    /// Output file; standard output when absent or `-`.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Select a pivotal sample from the rows of a CSV population.
    Sample(SampleArgs),
    /// Horvitz-Thompson estimate and optional local mean variance.
    Estimate(EstimateArgs),
    /// Spatial balance of a sample against a reference cloud.
    Balance(BalanceArgs),
    /// Draw an iid cloud from a continuous distribution.
    Discretize(DiscretizeArgs),
    /// Run one of the built-in experiments.
    Demo(DemoArgs),
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Population CSV: coordinate columns and an optional probability column.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,
    /// Sample size; every unit then gets probability n / N.
    #[arg(long)]
    pub n: Option<usize>,
    /// Name of the probability column.
    #[arg(long, default_value = "prob")]
    pub prob_col: String,
    /// Comma-separated coordinate columns (default: all except the probability,
    /// `index` and `weight` columns).
    #[arg(long)]
    pub coord_cols: Option<String>,
    #[arg(long, default_value = "lpm2")]
    pub method: String,
    /// euclidean, cityblock or chebyshev.
    #[arg(long, default_value = "euclidean")]
    pub distance: String,
    /// Emit the selected rows as CSV with a leading `index` column.
    #[arg(long)]
    pub with_rows: bool,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sample CSV with trait values, probabilities, optional weights and
    /// coordinates.
    #[arg(value_name = "INPUT")]
    pub input: PathBuf,
    #[arg(long, default_value = "y")]
    pub y_col: String,
    #[arg(long, default_value = "prob")]
    pub prob_col: String,
    /// Importance weight column, used when present.
    #[arg(long, default_value = "weight")]
    pub weight_col: String,
    /// Comma-separated coordinate columns (default: every other column
    /// except `index`).
    #[arg(long)]
    pub coord_cols: Option<String>,
    /// Population size N (default: the sum of 1 / prob).
    #[arg(long = "N")]
    pub population: Option<f64>,
    /// Neighbourhood size for the local mean variance estimate.
    #[arg(long)]
    pub nprime: Option<usize>,
    #[arg(long, default_value = "euclidean")]
    pub distance: String,
}

#[derive(Debug, Args)]
pub struct BalanceArgs {
    /// Sample coordinates CSV.
    #[arg(long, requires = "reference", conflicts_with = "generate")]
    pub sample: Option<PathBuf>,
    /// Reference cloud CSV.
    #[arg(long, requires = "sample")]
    pub reference: Option<PathBuf>,
    /// Generate samples from the uniform distribution on the unit cube
    /// (the default when no files are given).
    #[arg(long)]
    pub generate: bool,
    #[arg(long, default_value_t = 2)]
    pub q: usize,
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long = "N", default_value_t = 10_000)]
    pub population: usize,
    /// iid, lpm1 or lpm2.
    #[arg(long, default_value = "lpm2")]
    pub method: String,
    #[arg(long, default_value_t = 1)]
    pub replicates: usize,
    /// Size of a fresh uniform reference cloud; by default the discretized
    /// population itself is the reference.
    #[arg(long)]
    pub fresh_reference: Option<usize>,
}

#[derive(Debug, Args)]
pub struct DiscretizeArgs {
    /// uniform or normal.
    #[arg(long, default_value = "normal")]
    pub dist: String,
    #[arg(long, default_value_t = 1)]
    pub q: usize,
    #[arg(long = "N", default_value_t = 10_000)]
    pub population: usize,
    /// Normal means, one value or one per dimension.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0"
    )]
    pub mean: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub sd: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0"
    )]
    pub lower: Vec<f64>,
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "1"
    )]
    pub upper: Vec<f64>,
    /// Draw from a normal proposal with these means and weight by the
    /// density ratio.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub proposal_mean: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    pub proposal_sd: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Integral,
    Option,
    RareEvent,
    Rainforest,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub experiment: Experiment,
    /// Sample size (default 100, 50 for the rainforest).
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "N", default_value_t = 10_000)]
    pub population: usize,
    /// Replicate count.
    #[arg(long, default_value_t = 10_000)]
    pub m: usize,
    /// Comma-separated methods (default: every method the experiment
    /// supports).
    #[arg(long, value_delimiter = ',')]
    pub method: Option<Vec<String>>,
    /// Discretization sizes to sweep instead of a single N.
    #[arg(long = "sweep-N", value_delimiter = ',')]
    pub sweep: Option<Vec<usize>>,
    /// Critical forest covers for the rainforest experiment.
    #[arg(long, value_delimiter = ',', default_value = "0,0.1,0.2,0.3,0.4")]
    pub xcrit: Vec<f64>,
    #[arg(long = "R", default_value_t = 1.0)]
    pub growth: f64,
    #[arg(long = "M", default_value_t = 0.5)]
    pub death: f64,
    #[arg(long, default_value_t = 1e-2)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1e3)]
    pub t_max: f64,
    #[arg(long, default_value_t = 100.0)]
    pub spot: f64,
    #[arg(long, default_value_t = 120.0)]
    pub strike: f64,
    #[arg(long, default_value_t = 0.03)]
    pub rate: f64,
    #[arg(long, default_value_t = 0.5)]
    pub sigma: f64,
    #[arg(long, default_value_t = 0.25)]
    pub maturity: f64,
    /// Include wall-clock timings in the report (output is then no longer
    /// reproducible byte for byte).
    #[arg(long)]
    pub timing: bool,
}

/// Error with the process exit code it maps to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn format(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }

    pub fn domain(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::ProbabilityOutOfRange { .. }
            | Error::DecidedInput(..)
            | Error::NonFinite(_)
            | Error::TooFewUndecided(_) => CliError::domain(e.to_string()),
            _ => CliError::format(e.to_string()),
        }
    }
}

/// Runs a parsed command and returns the bytes it would write.
pub fn execute(cli: &Cli) -> Result<Vec<u8>, CliError> {
    match &cli.command {
        Command::Sample(a) => commands::sample(cli, a),
        Command::Estimate(a) => commands::estimate(cli, a),
        Command::Balance(a) => commands::balance(cli, a),
        Command::Discretize(a) => commands::discretize(cli, a),
        Command::Demo(a) => commands::demo(cli, a),
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let result = execute(&cli).and_then(|bytes| write_output(cli.output.as_ref(), &bytes));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}

fn write_output(path: Option<&PathBuf>, bytes: &[u8]) -> Result<(), CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => std::fs::write(p, bytes)
            .map_err(|e| CliError::format(format!("writing {}: {e}", p.display()))),
        _ => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)
                .and_then(|_| out.flush())
                .map_err(|e| CliError::format(format!("writing output: {e}")))
        }
    }
}

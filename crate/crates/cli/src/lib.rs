//! Command-line runner: `scatter`, `check` and `green-eval`.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{ExperimentConfig, Format};

/// Exit code of a run whose checks all passed.
pub const EXIT_OK: i32 = 0;
/// Exit code when some check fails.
pub const EXIT_CHECK_FAILED: i32 = 1;
/// Exit code of configuration and usage errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code of solver and I/O errors.
pub const EXIT_RUNTIME: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(biquat::Error),
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Solver(e) => write!(f, "solver error: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<biquat::Error> for CliError {
    fn from(e: biquat::Error) -> Self {
        CliError::Solver(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => EXIT_CONFIG,
            CliError::Solver(_) | CliError::Io(_) => EXIT_RUNTIME,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "biquat", version, about = "Biquaternionic electrodynamics experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand; they override the config document.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration document.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for parallel assembly and sampling.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Source-count sweep of the collocation scattering solver.
    Scatter {
        #[command(flatten)]
        common: Common,
        /// Comma-separated source counts.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
    },
    /// Run a verification suite.
    Check {
        #[command(flatten)]
        common: Common,
        /// algebra, kernels, factorizations, green, inhomog or all.
        #[arg(long)]
        suite: Option<String>,
    },
    /// Evaluate the time-domain chiral Green function at one point.
    #[command(allow_negative_numbers = true)]
    GreenEval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        t: Option<f64>,
        /// Comma-separated point `x1,x2,x3`.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<f64>>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        eps: Option<f64>,
        #[arg(long)]
        mu: Option<f64>,
        /// Print the residual refinement table instead of the value.
        #[arg(long)]
        sweep: bool,
    },
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match commands::execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("biquat: {e}");
            e.exit_code()
        }
    }
}

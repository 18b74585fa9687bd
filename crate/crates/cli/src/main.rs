//! `condprop`: conditional-proportion intervals from the command line.
//!
//! Exit codes: 0 on success, 1 when data or a computation fails, 2 when the
//! flags themselves are invalid. Files are only ever written below the
//! output directory (`--out`, or `CONDPROP_OUT` when the flag is absent).

mod commands;
mod data;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "condprop",
    version,
    about = "Kernel-smoothed confidence intervals for conditional proportions"
)]
struct Cli {
    /// Cap on worker threads (default: all cores). Results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format for stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    All,
    Wald,
    Wilson,
    #[value(alias = "agresti-coull", alias = "agresti_coull")]
    Ac,
}

impl MethodArg {
    pub fn methods(self) -> Vec<condprop::IntervalMethod> {
        use condprop::IntervalMethod as M;
        match self {
            Self::All => M::ALL.to_vec(),
            Self::Wald => vec![M::Wald],
            Self::Wilson => vec![M::Wilson],
            Self::Ac => vec![M::AgrestiCoull],
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical interval for a binomial proportion.
    CiProp(CiPropArgs),
    /// Bootstrap choice of the interval bandwidth at one point.
    SelectH(SelectHArgs),
    /// Monte-Carlo coverage study on a synthetic scenario.
    Simulate(SimulateArgs),
    /// Second-leg home advantage analysis on a ties file.
    Analyze(AnalyzeArgs),
}

#[derive(Debug, Args)]
pub struct OutArg {
    /// Directory for output files; nothing is written without it.
    #[arg(long, env = "CONDPROP_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CiPropArgs {
    #[arg(long)]
    pub successes: u64,
    #[arg(long)]
    pub trials: u64,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::All)]
    pub method: MethodArg,
    /// Decimal places in text output.
    #[arg(long, default_value_t = 3)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct SelectHArgs {
    /// Ties CSV or a two-column `x,y` CSV with 0/1 responses.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub x: f64,
    #[arg(long, value_enum, default_value_t = MethodArg::Wilson)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 1000)]
    pub b: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.05)]
    pub grid_min: f64,
    #[arg(long, default_value_t = 2.0)]
    pub grid_max: f64,
    #[arg(long, default_value_t = 200)]
    pub grid_steps: usize,
    /// `auto` (corrected AIC) or a positive bandwidth.
    #[arg(long, default_value = "auto")]
    pub pilot: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PilotArg {
    Fixed,
    Aicc,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub scenario: u8,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 500)]
    pub m: usize,
    #[arg(long, default_value_t = 500)]
    pub b: usize,
    /// Evaluation points, comma separated (default: the scenario's own).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    /// Pilot rule (default: fixed for scenario 1, aicc for scenario 2).
    #[arg(long, value_enum)]
    pub pilot: Option<PilotArg>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub exclude_extra_time: bool,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1000)]
    pub b: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Skip the logistic baseline.
    #[arg(long)]
    pub no_logistic: bool,
    #[command(flatten)]
    pub out: OutArg,
}

/// Failure classes mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Self::Runtime(e)
    }
}

impl From<condprop::Error> for Failure {
    fn from(e: condprop::Error) -> Self {
        Self::Runtime(e.into())
    }
}

pub fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }

    let result = match &cli.command {
        Command::CiProp(a) => commands::ci_prop(a, cli.format),
        Command::SelectH(a) => commands::select_h(a, cli.format),
        Command::Simulate(a) => commands::simulate(a, cli.format),
        Command::Analyze(a) => commands::analyze(a, cli.format),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor more information, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

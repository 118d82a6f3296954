//! `rdcann` command-line front end.
//!
//! Data goes to stdout or the named files; diagnostics and the echoed
//! effective configuration go to stderr. Exit codes: 0 success, 1 usage,
//! 2 I/O, 3 numeric failure, 4 schema.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rdcann::ErrorKind;

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_SCHEMA: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    pub fn io(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_IO,
            message: message.into(),
        }
    }
}

impl From<rdcann::Error> for CliError {
    fn from(err: rdcann::Error) -> Self {
        let code = match err.kind() {
            ErrorKind::Usage => EXIT_USAGE,
            ErrorKind::Io => EXIT_IO,
            ErrorKind::Numeric => EXIT_NUMERIC,
            ErrorKind::Schema => EXIT_SCHEMA,
        };
        CliError {
            code,
            message: err.to_string(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "rdcann", version, about = "Neural-network surrogate for RDC lube-oil extraction product flow")]
struct Cli {
    /// Plain-text `key = value` file supplying defaults for any flag.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic operating-data CSV.
    GenData(GenDataArgs),
    /// Train a 4-H-1 network and write a model file.
    Train(TrainArgs),
    /// Train every hidden size in a range and pick the best.
    ArchSearch(ArchSearchArgs),
    /// Score a model against a CSV.
    Evaluate(EvaluateArgs),
    /// Sweep one input through a model.
    Sweep(SweepArgs),
    /// Predict product flow for one operating point.
    Predict(PredictArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Number of samples.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Relative noise standard deviation.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainingFlags {
    /// Input CSV.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Epochs.
    #[arg(long)]
    pub iterations: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub momentum: Option<f64>,
    /// Seed for initialization and shuffling.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Training fraction.
    #[arg(long)]
    pub split: Option<f64>,
    /// Seed for the train/validation split (defaults to --seed).
    #[arg(long)]
    pub split_seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: TrainingFlags,
    #[arg(long)]
    pub hidden: Option<usize>,
    #[arg(long)]
    pub model_out: Option<PathBuf>,
    /// Optional `epoch,mse` CSV of the training history.
    #[arg(long)]
    pub history_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ArchSearchArgs {
    #[command(flatten)]
    pub common: TrainingFlags,
    #[arg(long)]
    pub min_hidden: Option<usize>,
    #[arg(long)]
    pub max_hidden: Option<usize>,
    /// Write the report as CSV to this file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print CSV instead of the aligned table.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Write `actual,predicted` pairs here.
    #[arg(long)]
    pub scatter_out: Option<PathBuf>,
    /// Print the metrics as CSV instead of `key = value`.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// sf_ratio, feed_temp, solvent_temp or rotation.
    #[arg(long)]
    pub var: String,
    #[arg(long, allow_negative_numbers = true)]
    pub from: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub to: f64,
    #[arg(long)]
    pub steps: usize,
    /// `key=value,...` overrides for the fixed inputs (default: training means).
    #[arg(long)]
    pub baseline: Option<String>,
    /// Write the sweep CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// `sf_ratio=..,feed_temp=..,solvent_temp=..,rotation=..`
    #[arg(long)]
    pub input: String,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let file = match &cli.config {
        Some(path) => config::FileConfig::load(path)?,
        None => config::FileConfig::default(),
    };
    match cli.command {
        Command::GenData(a) => commands::gen_data(&a, &file),
        Command::Train(a) => commands::train(&a, &file),
        Command::ArchSearch(a) => commands::arch_search(&a, &file),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Sweep(a) => commands::sweep(&a),
        Command::Predict(a) => commands::predict(&a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

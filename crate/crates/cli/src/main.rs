//! `hsd` — batch pipeline for Vietnamese hate-speech datasets.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/runtime error.
//! Diagnostics go to stderr; data goes to files or stdout.

mod commands;
mod config;
mod progress;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::FileConfig;

#[derive(Debug, Parser)]
#[command(
    name = "hsd",
    version,
    about = "Vietnamese hate-speech dataset pipeline: normalize, encode, decode, evaluate, weak-label, resample"
)]
pub struct Cli {
    /// TOML config file; command-line flags win over file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Turn skip-and-count row handling into hard failures.
    #[arg(long, global = true)]
    strict: bool,

    /// Suppress progress output.
    #[arg(long, global = true)]
    quiet: bool,

    /// Emit a progress line every N records.
    #[arg(long, global = true, value_name = "N")]
    progress_every: Option<u64>,

    /// Cap worker threads; output is identical regardless.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Clean raw comments: drop quotes, links, and @mentions, keep emoji.
    Normalize(commands::normalize::NormalizeArgs),
    /// Build prefix-task source/target pairs for text-to-text training.
    Encode(commands::encode::EncodeArgs),
    /// Parse raw model outputs into labels or index spans.
    Decode(commands::decode::DecodeArgs),
    /// Score predictions: accuracy, weighted F1, macro F1.
    Eval(commands::eval::EvalArgs),
    /// Annotate a corpus with a trained binary hate classifier.
    Weaklabel(commands::weaklabel::WeaklabelArgs),
    /// Rebalance a labeled corpus by hate ratio.
    Resample(commands::resample::ResampleArgs),
    /// Count labels, topics, and totals.
    Stats(commands::stats::StatsArgs),
    /// Convert between index spans and IOB token tags.
    Iob(commands::iob::IobArgs),
}

/// Distinguishes bad invocations from bad data for the exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Data(e.into())
    }
}

pub type CliResult<T = ()> = Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

/// Everything global a command needs.
pub struct Ctx {
    pub config: FileConfig,
    pub strict: bool,
    pub quiet: bool,
    pub progress_every: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version are successful exits, everything else is usage
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    let _ = e.print();
                    ExitCode::SUCCESS
                }
                _ => {
                    let _ = e.print();
                    ExitCode::from(1)
                }
            };
        }
    };

    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Data(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> CliResult {
    let config = match &cli.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };

    let jobs = cli.jobs.or(config.jobs);
    if let Some(jobs) = jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(anyhow::Error::from)?;
    }

    let ctx = Ctx {
        strict: cli.strict || config.strict.unwrap_or(false),
        quiet: cli.quiet || config.quiet.unwrap_or(false),
        progress_every: cli
            .progress_every
            .or(config.progress_every)
            .unwrap_or(100_000),
        config,
    };

    match cli.command {
        Command::Normalize(args) => commands::normalize::run(&ctx, args),
        Command::Encode(args) => commands::encode::run(&ctx, args),
        Command::Decode(args) => commands::decode::run(&ctx, args),
        Command::Eval(args) => commands::eval::run(&ctx, args),
        Command::Weaklabel(args) => commands::weaklabel::run(&ctx, args),
        Command::Resample(args) => commands::resample::run(&ctx, args),
        Command::Stats(args) => commands::stats::run(&ctx, args),
        Command::Iob(args) => commands::iob::run(&ctx, args),
    }
}

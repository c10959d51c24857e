//! `geobench`: the command-line pipeline for the geolocation benchmark —
//! ingest → stats → encode/export → (external fine-tuning) → decode →
//! eval → report, plus the n-gram baseline for GPU-free end-to-end runs.
//!
//! Exit codes: 0 success, 1 usage error, 2 data/validation error, 3 I/O
//! error. Outputs are written atomically; re-running a command with the
//! same inputs produces byte-identical files.

mod commands;
mod config;
mod error;
mod io_util;
mod svg;

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Parser)]
#[command(name = "geobench", version, about = "Geolocation benchmark pipeline for Italian social-media text")]
struct Cli {
    /// JSON config file; command-line flags override its values.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Join subtask-A and subtask-B TSVs into the merged dataset
    Ingest(commands::ingest::IngestArgs),
    /// Label distribution of a merged TSV
    Stats(commands::stats::StatsArgs),
    /// Instruction-encode a merged TSV to prompt/completion JSONL
    Encode(commands::encode::EncodeArgs),
    /// Encoded JSONL plus the fine-tuning manifest for external trainers
    Export(commands::export::ExportArgs),
    /// Parse raw model generations into a structured predictions TSV
    Decode(commands::decode::DecodeArgs),
    /// Score predictions against gold and write the report artifacts
    Eval(commands::eval::EvalArgs),
    /// Character n-gram baseline geolocalizer
    #[command(subcommand)]
    Baseline(commands::baseline::BaselineCommand),
    /// Dataset-side artifacts: label distribution and post-density map
    Report(commands::report::ReportArgs),
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Ingest(args) => commands::ingest::run(&args, &config),
        Command::Stats(args) => commands::stats::run(&args, &config),
        Command::Encode(args) => commands::encode::run(&args, &config),
        Command::Export(args) => commands::export::run(&args, &config),
        Command::Decode(args) => commands::decode::run(&args, &config),
        Command::Eval(args) => commands::eval::run(&args, &config),
        Command::Baseline(args) => commands::baseline::run(&args, &config),
        Command::Report(args) => commands::report::run(&args, &config),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = run(cli) {
        eprintln!("error: {err}");
        std::process::exit(err.exit_code());
    }
}

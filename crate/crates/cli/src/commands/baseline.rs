use std::path::PathBuf;

use clap::{Args, Subcommand};
use geobench_core::baseline::{train, NgramModel, DEFAULT_ALPHA, DEFAULT_N_RANGE};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_merged_records, parse_options, write_atomic};

use super::prediction_tsv_line;

#[derive(Subcommand)]
pub enum BaselineCommand {
    /// Train the n-gram model on a merged TSV
    Train(TrainArgs),
    /// Predict regions and coordinates for a merged TSV
    Predict(PredictArgs),
}

#[derive(Args)]
pub struct TrainArgs {
    /// Training merged TSV
    #[arg(long, value_name = "FILE")]
    pub train: PathBuf,

    /// Where to write the model file
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Smallest n-gram size
    #[arg(long, default_value_t = DEFAULT_N_RANGE.0)]
    pub n_min: usize,

    /// Largest n-gram size
    #[arg(long, default_value_t = DEFAULT_N_RANGE.1)]
    pub n_max: usize,

    /// Additive smoothing
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

#[derive(Args)]
pub struct PredictArgs {
    /// Model file written by `baseline train`
    #[arg(long, value_name = "FILE")]
    pub model: PathBuf,

    /// Merged TSV to predict on (gold labels are ignored)
    #[arg(long, value_name = "FILE")]
    pub input: PathBuf,

    /// Output predictions TSV
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(command: &BaselineCommand, config: &RunConfig) -> Result<(), CliError> {
    match command {
        BaselineCommand::Train(args) => run_train(args, config),
        BaselineCommand::Predict(args) => run_predict(args, config),
    }
}

fn run_train(args: &TrainArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let records = load_merged_records(&args.train, &opts)?;
    let model = train(&records, (args.n_min, args.n_max), args.alpha)?;
    write_atomic(&args.model, model.to_json().as_bytes())?;
    println!(
        "trained on {} records: {} regions, {} n-grams (n {}..={}, alpha {}), fingerprint {}",
        records.len(),
        model.log_priors.len(),
        model.vocabulary.len(),
        model.n_range.0,
        model.n_range.1,
        model.alpha,
        model.trained_on
    );
    Ok(())
}

fn run_predict(args: &PredictArgs, config: &RunConfig) -> Result<(), CliError> {
    let raw = std::fs::read_to_string(&args.model)
        .map_err(|e| CliError::io(format!("model file {}", args.model.display()), e))?;
    let model = NgramModel::from_json(&raw)?;
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let records = load_merged_records(&args.input, &opts)?;

    let mut out = String::new();
    for r in &records {
        let p = model.predict(&r.text);
        out.push_str(&prediction_tsv_line(&r.id, &r.text, &p));
    }
    write_atomic(&args.out, out.as_bytes())?;
    println!("predicted {} records to {}", records.len(), args.out.display());
    Ok(())
}

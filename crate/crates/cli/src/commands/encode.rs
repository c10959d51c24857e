use std::path::PathBuf;

use clap::Args;
use geobench_core::encoding::{encode_example, export_jsonl};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_merged_records, parse_options, write_atomic};

#[derive(Args)]
pub struct EncodeArgs {
    /// Merged TSV (id, text, region, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub merged: PathBuf,

    /// Output JSONL path
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Instruction text prefixed to every post
    #[arg(long, value_name = "TEXT")]
    pub instruction: Option<String>,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(args: &EncodeArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let instruction = args.instruction.as_deref().unwrap_or(&config.instruction_text);
    if instruction.is_empty() {
        return Err(CliError::Usage("instruction text must be nonempty".into()));
    }
    let records = load_merged_records(&args.merged, &opts)?;
    for r in &records {
        if r.text.trim().is_empty() {
            eprintln!("warning: record {} has empty text", r.id);
        }
    }
    let examples: Vec<_> = records.iter().map(|r| encode_example(r, instruction)).collect();
    let mut buf = Vec::new();
    let written = export_jsonl(&examples, &mut buf)?;
    write_atomic(&args.out, &buf)?;
    println!("wrote {written} encoded examples to {}", args.out.display());
    Ok(())
}

use std::path::PathBuf;

use clap::Args;
use geobench_core::encoding::{encode_example, export_jsonl, TrainingManifest};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_merged_records, parse_options, write_atomic};

#[derive(Args)]
pub struct ExportArgs {
    /// Merged TSV (id, text, region, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub merged: PathBuf,

    /// Output directory for train.jsonl and training_manifest.json
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Instruction text prefixed to every post
    #[arg(long, value_name = "TEXT")]
    pub instruction: Option<String>,

    /// Use the larger batch sizes of the 3B-parameter configuration
    #[arg(long)]
    pub minerva_profile: bool,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(args: &ExportArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let instruction = args.instruction.as_deref().unwrap_or(&config.instruction_text);
    if instruction.is_empty() {
        return Err(CliError::Usage("instruction text must be nonempty".into()));
    }
    let records = load_merged_records(&args.merged, &opts)?;
    let examples: Vec<_> = records.iter().map(|r| encode_example(r, instruction)).collect();
    let mut buf = Vec::new();
    let written = export_jsonl(&examples, &mut buf)?;
    write_atomic(&args.out_dir.join("train.jsonl"), &buf)?;

    let manifest = if args.minerva_profile {
        TrainingManifest::minerva(instruction)
    } else {
        TrainingManifest::standard(instruction)
    };
    manifest.validate().map_err(CliError::Data)?;
    let mut manifest_text =
        serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    manifest_text.push('\n');
    write_atomic(&args.out_dir.join("training_manifest.json"), manifest_text.as_bytes())?;

    write_atomic(
        &args.out_dir.join("effective_config.json"),
        config
            .effective_json(
                "export",
                serde_json::json!({
                    "merged": args.merged,
                    "minerva_profile": args.minerva_profile,
                }),
            )
            .as_bytes(),
    )?;

    println!(
        "wrote {written} examples and manifest (batch {}/{}) to {}",
        manifest.batch_size,
        manifest.micro_batch_size,
        args.out_dir.display()
    );
    Ok(())
}

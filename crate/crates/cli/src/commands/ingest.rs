use std::path::PathBuf;

use clap::Args;
use geobench_core::ingest::{merge_subtasks, serialize_tsv, Schema};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_tsv, parse_options, write_atomic};

#[derive(Args)]
pub struct IngestArgs {
    /// Subtask-A TSV (id, text, region)
    #[arg(long, value_name = "FILE")]
    pub subtask_a: PathBuf,

    /// Subtask-B TSV (id, text, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub subtask_b: PathBuf,

    /// Output directory for merged.tsv and ingest_report.json
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Skip one header line in the inputs
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(args: &IngestArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let a = load_tsv(&args.subtask_a, Schema::SubtaskA, &opts)?;
    let b = load_tsv(&args.subtask_b, Schema::SubtaskB, &opts)?;
    let merged = merge_subtasks(&a.rows, &b.rows)?;
    for warning in &merged.warnings {
        eprintln!("warning: {warning}");
    }
    if merged.records.is_empty() {
        eprintln!("warning: merged dataset is empty");
    }

    let mut tsv = Vec::new();
    serialize_tsv(&merged.records, &mut tsv)?;
    write_atomic(&args.out_dir.join("merged.tsv"), &tsv)?;

    let out_of_bbox: Vec<&str> = merged
        .records
        .iter()
        .filter(|r| !r.in_italy_bbox())
        .map(|r| r.id.as_str())
        .collect();
    let report = serde_json::json!({
        "rows_subtask_a": a.rows.len(),
        "rows_subtask_b": b.rows.len(),
        "merged_records": merged.records.len(),
        "unmatched_ids": merged.unmatched,
        "out_of_bbox_ids": out_of_bbox,
        "parse_warnings": a.warnings.iter().chain(&b.warnings).collect::<Vec<_>>(),
    });
    let mut report_text = serde_json::to_string_pretty(&report).expect("report serializes");
    report_text.push('\n');
    write_atomic(&args.out_dir.join("ingest_report.json"), report_text.as_bytes())?;
    write_atomic(
        &args.out_dir.join("effective_config.json"),
        config
            .effective_json(
                "ingest",
                serde_json::json!({
                    "subtask_a": args.subtask_a,
                    "subtask_b": args.subtask_b,
                }),
            )
            .as_bytes(),
    )?;

    println!(
        "merged {} records (subtask A: {}, subtask B: {}); unmatched ids: {}",
        merged.records.len(),
        a.rows.len(),
        b.rows.len(),
        merged.unmatched.len()
    );
    Ok(())
}

use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use geobench_core::ingest::compute_stats;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_merged_records, parse_options, write_atomic};

#[derive(Args)]
pub struct StatsArgs {
    /// Merged TSV (id, text, region, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub merged: PathBuf,

    /// Output directory for stats.csv
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Also render label_distribution.svg
    #[arg(long)]
    pub svg: bool,

    /// Skip one header line in the input
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

pub fn run(args: &StatsArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let records = load_merged_records(&args.merged, &opts)?;
    let stats = compute_stats(&records)?;

    // Descending frequency, the label bar-chart ordering.
    let ordered = stats.by_descending_count();
    let mut csv = String::from("region,count,fraction\n");
    for (region, share) in &ordered {
        let _ = writeln!(csv, "{},{},{}", region, share.count, share.fraction);
    }
    write_atomic(&args.out_dir.join("stats.csv"), csv.as_bytes())?;

    if args.svg {
        let bars: Vec<(String, f64)> = ordered
            .iter()
            .filter(|(_, s)| s.count > 0)
            .map(|(r, s)| (r.to_string(), s.count as f64))
            .collect();
        let svg = crate::svg::bar_chart("posts per region", &bars);
        write_atomic(&args.out_dir.join("label_distribution.svg"), svg.as_bytes())?;
    }
    write_atomic(
        &args.out_dir.join("effective_config.json"),
        config
            .effective_json("stats", serde_json::json!({ "merged": args.merged }))
            .as_bytes(),
    )?;

    println!("{:<24} {:>7} {:>10}", "region", "count", "fraction");
    for (region, share) in &ordered {
        println!("{:<24} {:>7} {:>10.4}", region.name(), share.count, share.fraction);
    }
    println!("{:<24} {:>7}", "total", stats.n);
    Ok(())
}

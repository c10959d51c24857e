use std::path::{Path, PathBuf};

use clap::Args;
use geobench_core::encoding::parse_generation;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_merged_records, parse_options, write_atomic};

use super::{prediction_tsv_line, resolve_fallback};

#[derive(Args)]
pub struct DecodeArgs {
    /// Raw model generations, one per line, aligned with the gold file
    #[arg(long, value_name = "FILE")]
    pub generations: PathBuf,

    /// Gold merged TSV the generations are aligned with
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,

    /// Output predictions TSV
    #[arg(long, value_name = "FILE")]
    pub out: PathBuf,

    /// Training split used to derive the fallback (defaults to --gold)
    #[arg(long, value_name = "FILE")]
    pub train: Option<PathBuf>,

    /// Fallback region for unparseable generations
    #[arg(long, value_name = "REGION")]
    pub fallback_region: Option<String>,

    /// Fallback latitude (requires --fallback-region and --fallback-lon)
    #[arg(long, value_name = "LAT")]
    pub fallback_lat: Option<f64>,

    /// Fallback longitude (requires --fallback-region and --fallback-lat)
    #[arg(long, value_name = "LON")]
    pub fallback_lon: Option<f64>,

    /// Skip one header line in the TSV inputs
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

/// One generation per line; a trailing newline does not create an empty
/// final generation.
pub fn read_generations(path: &Path) -> Result<Vec<String>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("generations file {}", path.display()), e))?;
    let mut lines: Vec<String> =
        raw.split('\n').map(|l| l.strip_suffix('\r').unwrap_or(l).to_string()).collect();
    if raw.ends_with('\n') {
        lines.pop();
    }
    Ok(lines)
}

pub fn run(args: &DecodeArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let golds = load_merged_records(&args.gold, &opts)?;
    let reference = match &args.train {
        Some(path) => load_merged_records(path, &opts)?,
        None => golds.clone(),
    };
    let fallback = resolve_fallback(
        args.fallback_region.as_deref(),
        args.fallback_lat,
        args.fallback_lon,
        config,
        &reference,
    )?;

    let generations = read_generations(&args.generations)?;
    if generations.len() != golds.len() {
        return Err(CliError::Data(format!(
            "alignment mismatch: {} generations for {} gold records",
            generations.len(),
            golds.len()
        )));
    }

    let mut out = String::new();
    let mut fallbacks = 0usize;
    for (gold, generation) in golds.iter().zip(&generations) {
        let p = parse_generation(generation, &fallback);
        if p.parse_status == geobench_core::ParseStatus::Fallback {
            fallbacks += 1;
        }
        out.push_str(&prediction_tsv_line(&gold.id, generation, &p));
    }
    write_atomic(&args.out, out.as_bytes())?;
    println!(
        "decoded {} generations ({} fallback) to {}",
        generations.len(),
        fallbacks,
        args.out.display()
    );
    Ok(())
}

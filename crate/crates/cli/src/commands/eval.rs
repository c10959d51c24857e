use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use geobench_core::encoding::parse_generation;
use geobench_core::geo::{annotate_geojson, area_error_map, AssignPolicy};
use geobench_core::ingest::Record;
use geobench_core::metrics::{confusion, evaluate};
use geobench_core::{ParseStatus, Prediction, Region};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::io_util::{load_geometry, load_geometry_doc, load_merged_records, parse_options, write_atomic};

use super::{resolve_fallback, resolve_geometry};
use super::decode::read_generations;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PredictionsFormat {
    /// Structured TSV when every line has the six prediction columns,
    /// otherwise raw generations
    Auto,
    /// One raw generation per line, aligned with the gold order
    Raw,
    /// id, text, region, lat, lon, parse_status
    Tsv,
}

#[derive(Args)]
pub struct EvalArgs {
    /// Gold merged TSV (id, text, region, lat, lon)
    #[arg(long, value_name = "FILE")]
    pub gold: PathBuf,

    /// Predictions: structured TSV or raw generations
    #[arg(long, value_name = "FILE")]
    pub predictions: PathBuf,

    /// Predictions layout
    #[arg(long, value_enum, default_value_t = PredictionsFormat::Auto)]
    pub format: PredictionsFormat,

    /// Output directory for the report artifacts
    #[arg(long, value_name = "DIR")]
    pub out_dir: PathBuf,

    /// Province/region GeoJSON for the per-area error map
    #[arg(long, value_name = "FILE")]
    pub geometry: Option<PathBuf>,

    /// Property carrying the area name in the GeoJSON
    #[arg(long, value_name = "KEY")]
    pub geometry_name_key: Option<String>,

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

    /// Snap gold points outside every polygon to the nearest centroid
    /// instead of reporting them unassigned
    #[arg(long)]
    pub snap_nearest_centroid: bool,

    /// Also render choropleth SVGs of the per-area errors
    #[arg(long)]
    pub svg: bool,

    /// Skip one header line in the TSV inputs
    #[arg(long)]
    pub header: bool,

    /// Skip malformed lines instead of aborting
    #[arg(long)]
    pub lenient: bool,
}

/// Parse a structured predictions file. Every line must carry
/// `id, text, region, lat, lon, parse_status`.
fn parse_predictions_tsv(path: &Path) -> Result<Vec<(String, Prediction)>, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("predictions file {}", path.display()), e))?;
    let mut out = Vec::new();
    for (idx, line) in raw.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.is_empty() {
            continue;
        }
        let line_no = idx + 1;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 6 {
            return Err(CliError::Data(format!(
                "predictions line {line_no}: expected 6 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let region = Region::resolve(fields[2]).ok_or_else(|| {
            CliError::Data(format!("predictions line {line_no}: unknown region {:?}", fields[2]))
        })?;
        let coord = |s: &str, what: &str| {
            s.trim().parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                CliError::Data(format!("predictions line {line_no}: bad {what} {s:?}"))
            })
        };
        let lat = coord(fields[3], "latitude")?;
        let lon = coord(fields[4], "longitude")?;
        let parse_status: ParseStatus = fields[5]
            .parse()
            .map_err(|e| CliError::Data(format!("predictions line {line_no}: {e}")))?;
        out.push((
            fields[0].to_string(),
            Prediction { region, lat, lon, parse_status, raw: fields[1].to_string() },
        ));
    }
    Ok(out)
}

fn looks_like_predictions_tsv(path: &Path) -> Result<bool, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("predictions file {}", path.display()), e))?;
    let mut any = false;
    for line in raw.lines().filter(|l| !l.is_empty()) {
        any = true;
        if line.split('\t').count() != 6 {
            return Ok(false);
        }
    }
    Ok(any)
}

/// Align id-keyed predictions with the gold order. The first gold id with
/// no prediction, a duplicate, or a prediction for an id not in gold is an
/// error.
fn align_by_id(
    entries: Vec<(String, Prediction)>,
    golds: &[Record],
) -> Result<Vec<Prediction>, CliError> {
    let gold_ids: std::collections::BTreeSet<&str> =
        golds.iter().map(|g| g.id.as_str()).collect();
    let mut by_id: BTreeMap<String, Prediction> = BTreeMap::new();
    for (id, prediction) in entries {
        if !gold_ids.contains(id.as_str()) {
            return Err(CliError::Data(format!("prediction for id {id} not present in gold")));
        }
        if by_id.insert(id.clone(), prediction).is_some() {
            return Err(CliError::Data(format!("duplicate prediction for id {id}")));
        }
    }
    golds
        .iter()
        .map(|g| {
            by_id
                .remove(&g.id)
                .ok_or_else(|| CliError::Data(format!("no prediction for gold id {}", g.id)))
        })
        .collect()
}

pub fn run(args: &EvalArgs, config: &RunConfig) -> Result<(), CliError> {
    let opts = parse_options(args.header || config.header, args.lenient || config.lenient);
    let golds = load_merged_records(&args.gold, &opts)?;

    let use_tsv = match args.format {
        PredictionsFormat::Tsv => true,
        PredictionsFormat::Raw => false,
        PredictionsFormat::Auto => looks_like_predictions_tsv(&args.predictions)?,
    };
    let preds: Vec<Prediction> = if use_tsv {
        align_by_id(parse_predictions_tsv(&args.predictions)?, &golds)?
    } else {
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
        let generations = read_generations(&args.predictions)?;
        if generations.len() != golds.len() {
            return Err(CliError::Data(format!(
                "alignment mismatch: {} generations for {} gold records",
                generations.len(),
                golds.len()
            )));
        }
        generations.iter().map(|g| parse_generation(g, &fallback)).collect()
    };

    let report = evaluate(&preds, &golds)?;
    write_atomic(&args.out_dir.join("report.json"), report.to_json_pretty().as_bytes())?;
    write_atomic(&args.out_dir.join("report.csv"), report.to_csv().as_bytes())?;

    let pred_regions: Vec<Region> = preds.iter().map(|p| p.region).collect();
    let gold_regions: Vec<Region> = golds.iter().map(|g| g.region).collect();
    let matrix = confusion(&pred_regions, &gold_regions)?;
    write_atomic(&args.out_dir.join("confusion.csv"), matrix.to_csv().as_bytes())?;

    let geometry_path =
        resolve_geometry(args.geometry.as_deref(), config, "provinces.geojson");
    match geometry_path {
        Some(path) => {
            let name_key =
                args.geometry_name_key.as_deref().unwrap_or(&config.geometry_name_key);
            let set = load_geometry(&path, name_key)?;
            let policy = if args.snap_nearest_centroid || config.snap_nearest_centroid {
                AssignPolicy::SnapNearestCentroid
            } else {
                AssignPolicy::Unassigned
            };
            let errors = area_error_map(&preds, &golds, &set.areas, policy)?;
            write_atomic(&args.out_dir.join("province_errors.csv"), errors.to_csv().as_bytes())?;
            let doc = load_geometry_doc(&path)?;
            let annotated = annotate_geojson(&doc, name_key, &errors)?;
            let mut geojson =
                serde_json::to_string_pretty(&annotated).expect("annotated geojson serializes");
            geojson.push('\n');
            write_atomic(&args.out_dir.join("province_errors.geojson"), geojson.as_bytes())?;
            if args.svg {
                let sums: BTreeMap<String, f64> =
                    errors.per_area.iter().map(|(k, v)| (k.clone(), v.sum_km)).collect();
                let means: BTreeMap<String, f64> =
                    errors.per_area.iter().map(|(k, v)| (k.clone(), v.mean_km)).collect();
                write_atomic(
                    &args.out_dir.join("province_errors_sum.svg"),
                    crate::svg::choropleth("sum of distance error (km)", &set.areas, &sums)
                        .as_bytes(),
                )?;
                write_atomic(
                    &args.out_dir.join("province_errors_mean.svg"),
                    crate::svg::choropleth("mean distance error (km)", &set.areas, &means)
                        .as_bytes(),
                )?;
            }
            if errors.unassigned.count > 0 {
                eprintln!(
                    "warning: {} samples outside every area (sum {} km)",
                    errors.unassigned.count, errors.unassigned.sum_km
                );
            }
        }
        None => {
            eprintln!("note: no geometry given; skipping province_errors outputs");
        }
    }

    write_atomic(
        &args.out_dir.join("effective_config.json"),
        config
            .effective_json(
                "eval",
                serde_json::json!({
                    "gold": args.gold,
                    "predictions": args.predictions,
                    "predictions_format": if use_tsv { "tsv" } else { "raw" },
                }),
            )
            .as_bytes(),
    )?;

    // Printed exactly as serialized into report.json.
    let number = |v: f64| serde_json::to_string(&v).expect("finite");
    println!("F1-score (macro): {}", number(report.macro_f1));
    println!("Avg Km: {}", number(report.avg_km));
    Ok(())
}

pub mod baseline;
pub mod decode;
pub mod encode;
pub mod eval;
pub mod export;
pub mod ingest;
pub mod report;
pub mod stats;

use std::path::{Path, PathBuf};

use geobench_core::encoding::FallbackPrediction;
use geobench_core::geo::gold_region_centroid;
use geobench_core::ingest::Record;
use geobench_core::Region;

use crate::config::{RunConfig, GEOMETRY_DIR_ENV};
use crate::error::CliError;

/// Fallback resolution, highest precedence first: explicit flags, config
/// file values, then the majority region of the reference split with its
/// gold centroid. A region without coordinates takes that region's
/// centroid from the reference split.
pub fn resolve_fallback(
    region_flag: Option<&str>,
    lat_flag: Option<f64>,
    lon_flag: Option<f64>,
    config: &RunConfig,
    reference: &[Record],
) -> Result<FallbackPrediction, CliError> {
    let region_raw = region_flag.map(str::to_string).or_else(|| config.fallback_region.clone());
    let lat = lat_flag.or(config.fallback_lat);
    let lon = lon_flag.or(config.fallback_lon);

    match (region_raw, lat, lon) {
        (Some(raw), lat, lon) => {
            let region = Region::resolve(&raw)
                .ok_or_else(|| CliError::Usage(format!("unknown fallback region {raw:?}")))?;
            let (lat, lon) = match (lat, lon) {
                (Some(lat), Some(lon)) => (lat, lon),
                (None, None) => gold_region_centroid(reference, region)?,
                _ => {
                    return Err(CliError::Usage(
                        "fallback latitude and longitude must be given together".into(),
                    ))
                }
            };
            Ok(FallbackPrediction { region, lat, lon })
        }
        (None, None, None) => geobench_core::encoding::majority_fallback(reference)
            .ok_or_else(|| CliError::Data("cannot derive a fallback from an empty split".into())),
        _ => Err(CliError::Usage(
            "a fallback region is required when fallback coordinates are given".into(),
        )),
    }
}

/// Geometry file precedence: explicit flag, config file, then
/// `$GEOBENCH_GEOMETRY_DIR/<default_file>` when that file exists.
pub fn resolve_geometry(
    flag: Option<&Path>,
    config: &RunConfig,
    default_file: &str,
) -> Option<PathBuf> {
    if let Some(path) = flag {
        return Some(path.to_path_buf());
    }
    if let Some(path) = &config.geometry {
        return Some(path.clone());
    }
    let dir = std::env::var_os(GEOMETRY_DIR_ENV)?;
    let candidate = PathBuf::from(dir).join(default_file);
    candidate.exists().then_some(candidate)
}

/// Predictions TSV line: the merged schema plus a trailing parse_status.
pub fn prediction_tsv_line(id: &str, text: &str, p: &geobench_core::Prediction) -> String {
    // Tabs and line breaks in echoed text would corrupt the TSV.
    let sanitized: String =
        text.chars().map(|c| if c == '\t' || c == '\n' || c == '\r' { ' ' } else { c }).collect();
    format!(
        "{id}\t{sanitized}\t{}\t{}\t{}\t{}\n",
        p.region,
        p.lat,
        p.lon,
        p.parse_status.as_str()
    )
}

//! Shared file plumbing: atomic writes and the loaders every command uses.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use geobench_core::geo::{load_geojson, GeometrySet};
use geobench_core::ingest::{parse_tsv, ParseMode, ParseOptions, Record, Schema, TsvParse};

use crate::error::CliError;

/// Write via a sibling temp file and rename, so readers never observe a
/// partial file and re-runs are all-or-nothing.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let parent = path.parent().filter(|p| !p.as_os_str().is_empty());
    if let Some(parent) = parent {
        std::fs::create_dir_all(parent)
            .map_err(|e| CliError::io(format!("creating {}", parent.display()), e))?;
    }
    let tmp = path.with_extension(format!(
        "{}.tmp-{}",
        path.extension().and_then(|e| e.to_str()).unwrap_or(""),
        std::process::id()
    ));
    std::fs::write(&tmp, bytes).map_err(|e| CliError::io(format!("writing {}", tmp.display()), e))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::io(format!("renaming to {}", path.display()), e))?;
    Ok(())
}

pub fn parse_options(header: bool, lenient: bool) -> ParseOptions {
    ParseOptions {
        mode: if lenient { ParseMode::Lenient } else { ParseMode::Strict },
        skip_header: header,
    }
}

pub fn load_tsv(path: &Path, schema: Schema, opts: &ParseOptions) -> Result<TsvParse, CliError> {
    let file =
        File::open(path).map_err(|e| CliError::io(format!("opening {}", path.display()), e))?;
    let parsed = parse_tsv(BufReader::new(file), schema, opts)?;
    for warning in &parsed.warnings {
        eprintln!("warning: {}: {warning}", path.display());
    }
    Ok(parsed)
}

pub fn load_merged_records(path: &Path, opts: &ParseOptions) -> Result<Vec<Record>, CliError> {
    let parsed = load_tsv(path, Schema::Merged, opts)?;
    geobench_core::ingest::check_unique_ids(&parsed.rows)?;
    parsed
        .rows
        .into_iter()
        .map(|row| {
            let (lat, lon) = row.coords.expect("merged schema carries coordinates");
            Record::new(row.id, row.text, row.region.expect("merged schema"), lat, lon)
                .map_err(CliError::from)
        })
        .collect()
}

pub fn load_geometry(path: &Path, name_key: &str) -> Result<GeometrySet, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("geometry file {}", path.display()), e))?;
    let doc: serde_json::Value = serde_json::from_str(&raw)
        .map_err(|e| CliError::Data(format!("geometry file {}: {e}", path.display())))?;
    let set = load_geojson(&doc, name_key)?;
    for warning in &set.warnings {
        eprintln!("warning: {}: {warning}", path.display());
    }
    Ok(set)
}

/// Raw document too, for choropleth annotation.
pub fn load_geometry_doc(path: &Path) -> Result<serde_json::Value, CliError> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("geometry file {}", path.display()), e))?;
    serde_json::from_str(&raw)
        .map_err(|e| CliError::Data(format!("geometry file {}: {e}", path.display())))
}

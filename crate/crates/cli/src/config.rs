//! Run configuration: built-in defaults, overridden by a JSON config file,
//! overridden by command-line flags. The resolved values are echoed into
//! the output directory for provenance.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use geobench_core::encoding::DEFAULT_INSTRUCTION;
use geobench_core::metrics::EARTH_RADIUS_KM;

use crate::error::CliError;

/// Environment variable naming the default geometry directory. `eval`
/// looks for `provinces.geojson` there, `report` for `regions.geojson`.
pub const GEOMETRY_DIR_ENV: &str = "GEOBENCH_GEOMETRY_DIR";

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub instruction_text: String,
    /// Explicit fallback for unparseable generations; when absent the
    /// majority region of the reference split is used.
    pub fallback_region: Option<String>,
    pub fallback_lat: Option<f64>,
    pub fallback_lon: Option<f64>,
    pub geometry: Option<PathBuf>,
    pub geometry_name_key: String,
    pub snap_nearest_centroid: bool,
    /// Input TSVs carry one header line to skip.
    pub header: bool,
    /// Skip malformed lines instead of aborting.
    pub lenient: bool,
    /// Seed recorded for any randomized fixture generation.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            instruction_text: DEFAULT_INSTRUCTION.to_string(),
            fallback_region: None,
            fallback_lat: None,
            fallback_lon: None,
            geometry: None,
            geometry_name_key: "name".to_string(),
            snap_nearest_centroid: false,
            header: false,
            lenient: false,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<RunConfig, CliError> {
        let Some(path) = path else {
            return Ok(RunConfig::default());
        };
        let raw = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("config file {}", path.display()), e))?;
        serde_json::from_str(&raw)
            .map_err(|e| CliError::Usage(format!("config file {}: {e}", path.display())))
    }

    /// The provenance document written next to a command's outputs. Fixed
    /// metric declarations ride along so reports are self-describing.
    pub fn effective_json(&self, command: &str, extra: serde_json::Value) -> String {
        let mut doc = serde_json::json!({
            "command": command,
            "config": self,
            "metrics": {
                "distance_formula": "haversine",
                "earth_radius_km": EARTH_RADIUS_KM,
                "macro_f1_class_universe": "classes present in gold labels",
            },
        });
        if let Some(map) = extra.as_object() {
            for (key, value) in map {
                doc[key] = value.clone();
            }
        }
        let mut s = serde_json::to_string_pretty(&doc).expect("config serializes");
        s.push('\n');
        s
    }
}

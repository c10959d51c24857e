//! Instruction encoding and decoding.
//!
//! Training examples are serialized as a prompt (`instruction` + post text)
//! and a structured completion `[regione] <region> [geo] <lat> <lon>`, so a
//! single generative model answers both the region and the coordinates.
//! Decoding goes the other way: free-form model output is parsed back into
//! a structured prediction, with a bounded set of deterministic repairs and
//! a configured fallback when nothing recoverable remains. Decoding is
//! total: every input string yields a prediction.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::ingest::Record;
use crate::regions::Region;

/// Marker that precedes the region label in a completion.
pub const REGION_MARKER: &str = "[regione]";
/// Marker that precedes the coordinates in a completion.
pub const GEO_MARKER: &str = "[geo]";

/// Default instruction prefixed to every post. The exact wording is
/// configurable; the encoding treats it as opaque text.
pub const DEFAULT_INSTRUCTION: &str =
    "Indica la regione e le coordinate di provenienza del seguente post:";

/// A prompt/completion pair in the instruction format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodedExample {
    pub prompt: String,
    pub completion: String,
}

/// How a generation was decoded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParseStatus {
    /// Exact completion format, nothing stripped or fixed.
    Clean,
    /// Recoverable deviation fixed by one of the bounded repair rules.
    Repaired,
    /// Not recoverable; the configured fallback values were substituted.
    Fallback,
}

impl ParseStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            ParseStatus::Clean => "clean",
            ParseStatus::Repaired => "repaired",
            ParseStatus::Fallback => "fallback",
        }
    }
}

impl std::str::FromStr for ParseStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "clean" => Ok(ParseStatus::Clean),
            "repaired" => Ok(ParseStatus::Repaired),
            "fallback" => Ok(ParseStatus::Fallback),
            other => Err(format!("unknown parse status {other:?}")),
        }
    }
}

/// A decoded model output: region, coordinates, how cleanly it parsed, and
/// the original generation for diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub region: Region,
    pub lat: f64,
    pub lon: f64,
    pub parse_status: ParseStatus,
    pub raw: String,
}

/// Values substituted when a generation cannot be decoded. Typically the
/// training split's majority region and that region's gold centroid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FallbackPrediction {
    pub region: Region,
    pub lat: f64,
    pub lon: f64,
}

/// Render the completion for a labeled example: single spaces, coordinates
/// in the shortest round-tripping decimal form (same rule as the TSV
/// serializer).
pub fn format_completion(region: Region, lat: f64, lon: f64) -> String {
    format!("{REGION_MARKER} {region} {GEO_MARKER} {lat} {lon}")
}

/// Encode one record as a prompt/completion pair.
pub fn encode_example(record: &Record, instruction: &str) -> EncodedExample {
    EncodedExample {
        prompt: format!("{} {}\n", instruction, record.text),
        completion: format_completion(record.region, record.lat, record.lon),
    }
}

/// Decode a model generation. Never fails: anything the bounded repair
/// rules cannot fix becomes a fallback prediction carrying the original
/// text.
///
/// Repairs, applied deterministically: text before the first marker or
/// after the parsed payload is stripped; swapped marker order is accepted;
/// comma decimal separators and comma-separated coordinate pairs are
/// normalized. Region labels always resolve through the alias table.
pub fn parse_generation(text: &str, fallback: &FallbackPrediction) -> Prediction {
    match try_parse(text) {
        Some((region, lat, lon, repaired)) => Prediction {
            region,
            lat,
            lon,
            parse_status: if repaired { ParseStatus::Repaired } else { ParseStatus::Clean },
            raw: text.to_string(),
        },
        None => Prediction {
            region: fallback.region,
            lat: fallback.lat,
            lon: fallback.lon,
            parse_status: ParseStatus::Fallback,
            raw: text.to_string(),
        },
    }
}

fn try_parse(text: &str) -> Option<(Region, f64, f64, bool)> {
    let region_idx = text.find(REGION_MARKER)?;
    let geo_idx = text.find(GEO_MARKER)?;

    let mut repaired = false;
    let (region_str, coord_str) = if region_idx < geo_idx {
        let head = &text[..region_idx];
        if !head.trim().is_empty() {
            repaired = true;
        }
        (
            &text[region_idx + REGION_MARKER.len()..geo_idx],
            &text[geo_idx + GEO_MARKER.len()..],
        )
    } else {
        // Swapped marker order; head text before [geo] is stripped too.
        repaired = true;
        (
            &text[region_idx + REGION_MARKER.len()..],
            &text[geo_idx + GEO_MARKER.len()..region_idx],
        )
    };

    let region = Region::resolve(region_str)?;
    let (lat, lon, coord_repair) = parse_coordinates(coord_str)?;
    Some((region, lat, lon, repaired || coord_repair))
}

/// Extract two finite numbers from the text after the geo marker.
/// Accepts `45.07 7.67`, decimal commas (`45,07 7,67`), comma-separated
/// pairs (`45.07,7.67`), and trailing extra text (stripped, flagged as a
/// repair).
fn parse_coordinates(tail: &str) -> Option<(f64, f64, bool)> {
    let mut nums: Vec<f64> = Vec::with_capacity(2);
    let mut repaired = false;

    for token in tail.split_whitespace() {
        if nums.len() == 2 {
            repaired = true; // extra trailing text
            break;
        }
        if let Some(v) = parse_finite(token) {
            nums.push(v);
            continue;
        }
        if token.contains(',') {
            if !token.contains('.') && token.matches(',').count() == 1 {
                // Decimal comma: "45,0729".
                if let Some(v) = parse_finite(&token.replace(',', ".")) {
                    nums.push(v);
                    repaired = true;
                    continue;
                }
            }
            // Comma as separator: "45.0729,7.6758" or "45,0729,7,6758"
            // handled pairwise below once decimal commas are ruled out.
            let parts: Vec<f64> = token
                .split(',')
                .filter(|p| !p.is_empty())
                .map(parse_finite)
                .collect::<Option<_>>()?;
            if parts.is_empty() {
                return None;
            }
            for v in parts {
                if nums.len() < 2 {
                    nums.push(v);
                }
            }
            repaired = true;
            continue;
        }
        // An unparseable token before both numbers were found.
        return None;
    }

    match nums.as_slice() {
        [lat, lon] => Some((*lat, *lon, repaired)),
        _ => None,
    }
}

fn parse_finite(token: &str) -> Option<f64> {
    token.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Error from [`export_jsonl`], carrying how many lines made it out.
#[derive(Debug, thiserror::Error)]
#[error("jsonl export failed after {written} lines written")]
pub struct ExportError {
    pub written: usize,
    #[source]
    pub source: std::io::Error,
}

/// Write one JSON object per example with keys `prompt` and `completion`.
/// Returns the number of lines written.
pub fn export_jsonl(
    examples: &[EncodedExample],
    mut writer: impl Write,
) -> Result<usize, ExportError> {
    let mut written = 0;
    for example in examples {
        let line = serde_json::to_string(example).expect("string-only struct serializes");
        writeln!(writer, "{line}").map_err(|source| ExportError { written, source })?;
        written += 1;
    }
    Ok(written)
}

/// The fine-tuning hyperparameters serialized for external trainers.
/// `standard` matches the shared configuration; `minerva` uses the larger
/// batch and micro-batch sizes of the 3-billion-parameter run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainingManifest {
    pub epochs: u32,
    pub batch_size: u32,
    pub micro_batch_size: u32,
    pub learning_rate: f64,
    pub warmup_ratio: f64,
    pub lora_r: u32,
    pub lora_alpha: u32,
    pub lora_dropout: f64,
    pub quantization_bits: u32,
    pub instruction_text: String,
}

impl TrainingManifest {
    pub fn standard(instruction: impl Into<String>) -> TrainingManifest {
        TrainingManifest {
            epochs: 10,
            batch_size: 32,
            micro_batch_size: 8,
            learning_rate: 3e-4,
            warmup_ratio: 0.1,
            lora_r: 8,
            lora_alpha: 16,
            lora_dropout: 0.05,
            quantization_bits: 4,
            instruction_text: instruction.into(),
        }
    }

    pub fn minerva(instruction: impl Into<String>) -> TrainingManifest {
        TrainingManifest {
            batch_size: 64,
            micro_batch_size: 32,
            ..TrainingManifest::standard(instruction)
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let positives: [(&str, f64); 8] = [
            ("epochs", self.epochs as f64),
            ("batch_size", self.batch_size as f64),
            ("micro_batch_size", self.micro_batch_size as f64),
            ("learning_rate", self.learning_rate),
            ("lora_r", self.lora_r as f64),
            ("lora_alpha", self.lora_alpha as f64),
            ("lora_dropout", self.lora_dropout),
            ("quantization_bits", self.quantization_bits as f64),
        ];
        for (name, value) in positives {
            if value <= 0.0 {
                return Err(format!("{name} must be positive, got {value}"));
            }
        }
        if !(0.0..=1.0).contains(&self.warmup_ratio) {
            return Err(format!("warmup_ratio must be in [0, 1], got {}", self.warmup_ratio));
        }
        Ok(())
    }
}

/// Majority-class fallback: the most frequent region in `records` and that
/// region's gold-coordinate centroid.
pub fn majority_fallback(records: &[Record]) -> Option<FallbackPrediction> {
    let mut counts: BTreeMap<Region, usize> = BTreeMap::new();
    for r in records {
        *counts.entry(r.region).or_insert(0) += 1;
    }
    // Max count; strict comparison keeps the canonically-first region on ties.
    let mut best: Option<(Region, usize)> = None;
    for (&region, &count) in &counts {
        if best.is_none_or(|(_, best_count)| count > best_count) {
            best = Some((region, count));
        }
    }
    let (region, _) = best?;
    let (lat, lon) = crate::geo::gold_region_centroid(records, region).ok()?;
    Some(FallbackPrediction { region, lat, lon })
}

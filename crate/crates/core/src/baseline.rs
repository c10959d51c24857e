//! Desk-scale geolocalizer: a multinomial naive-Bayes classifier over
//! character n-grams for the region, with the predicted region's gold
//! centroid as the coordinate estimate.
//!
//! Character n-grams (rather than words) because the regional signal in
//! this data is dialectal orthography, which lives in sub-word units.
//! Placeholder tokens like `[USER]` are collapsed to a single sentinel
//! character so they cannot dominate the counts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoding::{format_completion, ParseStatus, Prediction};
use crate::geo::gold_region_centroid;
use crate::ingest::Record;
use crate::regions::Region;

/// Bump when the serialized model layout changes.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Default inclusive n-gram size range.
pub const DEFAULT_N_RANGE: (usize, usize) = (2, 4);
/// Default additive smoothing.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// Sentinel substituted for `[USER]`-style placeholders (private-use
/// codepoint, cannot appear in real post text).
const PLACEHOLDER_SENTINEL: char = '\u{E000}';

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error("empty training set")]
    EmptyTrainingSet,
    #[error("smoothing alpha must be positive, got {0}")]
    InvalidAlpha(f64),
    #[error("invalid n-gram range {0}..={1} (need 1 <= lo <= hi)")]
    InvalidNgramRange(usize, usize),
    #[error("model format version {found}, this build reads {expected}")]
    FormatVersion { found: u32, expected: u32 },
    #[error("malformed model file: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error(transparent)]
    Geo(#[from] crate::geo::GeoError),
}

/// Trained multinomial model. Likelihood rows are proper log-distributions
/// over the vocabulary; n-grams unseen in training score at the smoothing
/// floor `alpha / (total_r + alpha * |V|)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NgramModel {
    pub format_version: u32,
    pub n_range: (usize, usize),
    pub alpha: f64,
    pub vocabulary: BTreeMap<String, usize>,
    pub log_priors: BTreeMap<Region, f64>,
    pub log_likelihoods: BTreeMap<Region, Vec<f64>>,
    pub log_unknown: BTreeMap<Region, f64>,
    pub region_centroids: BTreeMap<Region, (f64, f64)>,
    /// Fingerprint of the training records, for provenance.
    pub trained_on: String,
}

/// Lowercase, with `[USER]`-style placeholders (brackets around capitals
/// and underscores) collapsed to one sentinel character. Apostrophes and
/// accents are preserved.
pub fn normalize_text(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        if chars[i] == '[' {
            if let Some(close) = placeholder_end(&chars, i) {
                out.push(PLACEHOLDER_SENTINEL);
                i = close + 1;
                continue;
            }
        }
        out.extend(chars[i].to_lowercase());
        i += 1;
    }
    out
}

/// Index of the closing `]` if `chars[open..]` starts a placeholder token:
/// at least one character, all ASCII uppercase or underscore.
fn placeholder_end(chars: &[char], open: usize) -> Option<usize> {
    let mut j = open + 1;
    while j < chars.len() && (chars[j].is_ascii_uppercase() || chars[j] == '_') {
        j += 1;
    }
    (j > open + 1 && j < chars.len() && chars[j] == ']').then_some(j)
}

fn char_ngrams(text: &str, n_range: (usize, usize)) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut grams = Vec::new();
    for n in n_range.0..=n_range.1 {
        if chars.len() < n {
            continue;
        }
        for window in chars.windows(n) {
            grams.push(window.iter().collect());
        }
    }
    grams
}

fn fingerprint(records: &[Record]) -> String {
    let mut hasher = Sha256::new();
    for r in records {
        hasher.update(r.id.as_bytes());
        hasher.update([0]);
        hasher.update(r.text.as_bytes());
        hasher.update([0]);
        hasher.update(r.region.name().as_bytes());
        hasher.update(r.lat.to_le_bytes());
        hasher.update(r.lon.to_le_bytes());
    }
    let digest = hasher.finalize();
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Train on gold records with additive-alpha smoothing.
pub fn train(
    records: &[Record],
    n_range: (usize, usize),
    alpha: f64,
) -> Result<NgramModel, BaselineError> {
    if records.is_empty() {
        return Err(BaselineError::EmptyTrainingSet);
    }
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(BaselineError::InvalidAlpha(alpha));
    }
    if n_range.0 == 0 || n_range.0 > n_range.1 {
        return Err(BaselineError::InvalidNgramRange(n_range.0, n_range.1));
    }

    let mut gram_counts: BTreeMap<Region, BTreeMap<String, usize>> = BTreeMap::new();
    let mut record_counts: BTreeMap<Region, usize> = BTreeMap::new();
    for r in records {
        *record_counts.entry(r.region).or_insert(0) += 1;
        let counts = gram_counts.entry(r.region).or_default();
        for gram in char_ngrams(&normalize_text(&r.text), n_range) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }

    let vocabulary: BTreeMap<String, usize> = {
        let all: std::collections::BTreeSet<&String> =
            gram_counts.values().flat_map(|c| c.keys()).collect();
        all.into_iter().cloned().zip(0..).collect()
    };
    let vocab_size = vocabulary.len();

    let n_total = records.len() as f64;
    let mut log_priors = BTreeMap::new();
    let mut log_likelihoods = BTreeMap::new();
    let mut log_unknown = BTreeMap::new();
    let mut region_centroids = BTreeMap::new();

    for (&region, &count) in &record_counts {
        log_priors.insert(region, (count as f64 / n_total).ln());
        let counts = &gram_counts[&region];
        let total: usize = counts.values().sum();
        let denominator = total as f64 + alpha * vocab_size as f64;
        let mut row = vec![0.0; vocab_size];
        for (gram, &index) in &vocabulary {
            let c = counts.get(gram).copied().unwrap_or(0);
            row[index] = ((c as f64 + alpha) / denominator).ln();
        }
        log_likelihoods.insert(region, row);
        // With an empty vocabulary no n-gram can ever be scored; keep the
        // floor at 0 so posteriors stay finite.
        let floor = if vocab_size == 0 { 0.0 } else { (alpha / denominator).ln() };
        log_unknown.insert(region, floor);
        region_centroids.insert(region, gold_region_centroid(records, region)?);
    }

    Ok(NgramModel {
        format_version: MODEL_FORMAT_VERSION,
        n_range,
        alpha,
        vocabulary,
        log_priors,
        log_likelihoods,
        log_unknown,
        region_centroids,
        trained_on: fingerprint(records),
    })
}

impl NgramModel {
    /// Unnormalized log-posterior per trained region.
    pub fn posterior_log_scores(&self, text: &str) -> BTreeMap<Region, f64> {
        let grams = char_ngrams(&normalize_text(text), self.n_range);
        let mut scores: BTreeMap<Region, f64> = self.log_priors.clone();
        for gram in &grams {
            match self.vocabulary.get(gram) {
                Some(&index) => {
                    for (region, score) in scores.iter_mut() {
                        *score += self.log_likelihoods[region][index];
                    }
                }
                None => {
                    for (region, score) in scores.iter_mut() {
                        *score += self.log_unknown[region];
                    }
                }
            }
        }
        scores
    }

    /// Argmax of the posterior, ties broken by canonical region order; the
    /// coordinates are the predicted region's training centroid.
    pub fn predict(&self, text: &str) -> Prediction {
        let scores = self.posterior_log_scores(text);
        let (&region, _) = scores
            .iter()
            .fold(None::<(&Region, &f64)>, |best, (r, s)| match best {
                Some((_, best_s)) if *best_s >= *s => best,
                _ => Some((r, s)),
            })
            .expect("trained model has at least one region");
        let (lat, lon) = self.region_centroids[&region];
        Prediction {
            region,
            lat,
            lon,
            parse_status: ParseStatus::Clean,
            raw: format_completion(region, lat, lon),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(raw: &str) -> Result<NgramModel, BaselineError> {
        // Check the version before full deserialization so a layout change
        // in a newer format still produces the right error.
        let probe: serde_json::Value = serde_json::from_str(raw)?;
        let found = probe
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .unwrap_or(0) as u32;
        if found != MODEL_FORMAT_VERSION {
            return Err(BaselineError::FormatVersion {
                found,
                expected: MODEL_FORMAT_VERSION,
            });
        }
        Ok(serde_json::from_str(raw)?)
    }
}

/// Constant predictor: always the most frequent training region and its
/// centroid (canonical order breaks count ties).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MajorityBaseline {
    pub region: Region,
    pub lat: f64,
    pub lon: f64,
}

pub fn majority_baseline(train: &[Record]) -> Result<MajorityBaseline, BaselineError> {
    let fb = crate::encoding::majority_fallback(train).ok_or(BaselineError::EmptyTrainingSet)?;
    Ok(MajorityBaseline { region: fb.region, lat: fb.lat, lon: fb.lon })
}

impl MajorityBaseline {
    pub fn predict(&self) -> Prediction {
        Prediction {
            region: self.region,
            lat: self.lat,
            lon: self.lon,
            parse_status: ParseStatus::Clean,
            raw: format_completion(self.region, self.lat, self.lon),
        }
    }
}

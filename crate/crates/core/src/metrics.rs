//! Campaign metrics: macro/micro F1 with per-class breakdown for the
//! region-classification subtask, average great-circle distance error in
//! km for the coordinate subtask, and row-normalized confusion matrices.
//!
//! The distance formula is haversine on a sphere of radius 6371.0088 km
//! (IUGG mean Earth radius); the campaign never pinned a formula, so this
//! one is declared so scores reproduce bit-for-bit. Macro F1 averages over
//! the classes present in the gold labels; zero-denominator precision or
//! recall counts as 0.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::encoding::{ParseStatus, Prediction};
use crate::ingest::Record;
use crate::regions::Region;

/// IUGG mean Earth radius in km.
pub const EARTH_RADIUS_KM: f64 = 6371.0088;

#[derive(Debug, thiserror::Error)]
pub enum MetricsError {
    #[error("length mismatch: {preds} predictions vs {golds} gold labels")]
    LengthMismatch { preds: usize, golds: usize },
    #[error("empty input: {context}")]
    EmptyInput { context: &'static str },
    #[error("non-finite coordinate in {what}")]
    NonFinite { what: &'static str },
}

/// Great-circle distance between two (lat, lon) points in degrees.
pub fn haversine_km(p: (f64, f64), q: (f64, f64)) -> Result<f64, MetricsError> {
    if !(p.0.is_finite() && p.1.is_finite()) {
        return Err(MetricsError::NonFinite { what: "first point" });
    }
    if !(q.0.is_finite() && q.1.is_finite()) {
        return Err(MetricsError::NonFinite { what: "second point" });
    }
    let (lat1, lon1) = (p.0.to_radians(), p.1.to_radians());
    let (lat2, lon2) = (q.0.to_radians(), q.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let a = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    let c = 2.0 * a.sqrt().atan2((1.0 - a).sqrt());
    Ok(EARTH_RADIUS_KM * c)
}

fn check_lengths(preds: usize, golds: usize, context: &'static str) -> Result<(), MetricsError> {
    if preds != golds {
        return Err(MetricsError::LengthMismatch { preds, golds });
    }
    if golds == 0 {
        return Err(MetricsError::EmptyInput { context });
    }
    Ok(())
}

/// Per-class true positives, false positives, false negatives over the
/// classes seen in either vector.
fn class_counts(
    preds: &[Region],
    golds: &[Region],
) -> BTreeMap<Region, (usize, usize, usize)> {
    let mut counts: BTreeMap<Region, (usize, usize, usize)> = BTreeMap::new();
    for (&p, &g) in preds.iter().zip(golds) {
        if p == g {
            counts.entry(g).or_default().0 += 1;
        } else {
            counts.entry(p).or_default().1 += 1;
            counts.entry(g).or_default().2 += 1;
        }
    }
    counts
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> (f64, f64, f64) {
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Unweighted mean of per-class F1 over the classes present in the gold
/// labels. Classes appearing only in predictions contribute false
/// positives but no F1 term of their own.
pub fn f1_macro(preds: &[Region], golds: &[Region]) -> Result<f64, MetricsError> {
    check_lengths(preds.len(), golds.len(), "f1_macro")?;
    let counts = class_counts(preds, golds);
    let gold_classes: std::collections::BTreeSet<Region> = golds.iter().copied().collect();
    let sum: f64 = gold_classes
        .iter()
        .map(|class| {
            let &(tp, fp, fn_) = counts.get(class).expect("gold class counted");
            f1_from_counts(tp, fp, fn_).2
        })
        .sum();
    Ok(sum / gold_classes.len() as f64)
}

/// F1 pooled over all decisions. In this single-label multiclass setting
/// it equals plain accuracy.
pub fn f1_micro(preds: &[Region], golds: &[Region]) -> Result<f64, MetricsError> {
    check_lengths(preds.len(), golds.len(), "f1_micro")?;
    let correct = preds.iter().zip(golds).filter(|(p, g)| p == g).count();
    Ok(correct as f64 / golds.len() as f64)
}

/// Neumaier-compensated sum, so parallel and serial callers agree on the
/// mean to well under 1e-9 relative.
pub(crate) fn compensated_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut compensation = 0.0;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            compensation += (sum - t) + v;
        } else {
            compensation += (v - t) + sum;
        }
        sum = t;
    }
    sum + compensation
}

/// Arithmetic mean of the haversine error over aligned prediction/gold
/// pairs. Fallback predictions are scored like any other.
pub fn avg_distance_error(preds: &[Prediction], golds: &[Record]) -> Result<f64, MetricsError> {
    check_lengths(preds.len(), golds.len(), "avg_distance_error")?;
    let mut distances = Vec::with_capacity(golds.len());
    for (p, g) in preds.iter().zip(golds) {
        distances.push(haversine_km((p.lat, p.lon), (g.lat, g.lon))?);
    }
    Ok(compensated_sum(distances) / golds.len() as f64)
}

/// Row-normalized confusion matrix. Columns cover every class present in
/// gold or predictions (canonical order); rows exist only for classes with
/// gold support, so each row sums to 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    /// Predicted-class axis: classes present in gold or predictions.
    pub classes: Vec<Region>,
    /// Gold-class axis: classes with at least one gold sample.
    pub rows: Vec<Region>,
    /// Raw counts, indexed `[row][column]`.
    pub counts: Vec<Vec<usize>>,
    /// Row-normalized frequencies, same indexing.
    pub frequencies: Vec<Vec<f64>>,
}

pub fn confusion(preds: &[Region], golds: &[Region]) -> Result<ConfusionMatrix, MetricsError> {
    check_lengths(preds.len(), golds.len(), "confusion")?;
    let classes: Vec<Region> = {
        let set: std::collections::BTreeSet<Region> =
            preds.iter().chain(golds.iter()).copied().collect();
        set.into_iter().collect()
    };
    let rows: Vec<Region> = {
        let set: std::collections::BTreeSet<Region> = golds.iter().copied().collect();
        set.into_iter().collect()
    };
    let col_of: BTreeMap<Region, usize> =
        classes.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let row_of: BTreeMap<Region, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();

    let mut counts = vec![vec![0usize; classes.len()]; rows.len()];
    for (&p, &g) in preds.iter().zip(golds) {
        counts[row_of[&g]][col_of[&p]] += 1;
    }
    let frequencies = counts
        .iter()
        .map(|row| {
            let support: usize = row.iter().sum();
            row.iter().map(|&c| c as f64 / support as f64).collect()
        })
        .collect();
    Ok(ConfusionMatrix { classes, rows, counts, frequencies })
}

impl ConfusionMatrix {
    /// CSV with a header row/column of class names; zero-count cells
    /// render as `-`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for class in &self.classes {
            out.push(',');
            out.push_str(class.name());
        }
        out.push('\n');
        for (i, row_class) in self.rows.iter().enumerate() {
            out.push_str(row_class.name());
            for j in 0..self.classes.len() {
                if self.counts[i][j] == 0 {
                    out.push_str(",-");
                } else {
                    let _ = write!(out, ",{:.4}", self.frequencies[i][j]);
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Per-class precision/recall/F1 and gold support.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

/// The full evaluation result for one predictions/gold pairing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub macro_f1: f64,
    pub micro_f1: f64,
    pub avg_km: f64,
    pub parse_failure_rate: f64,
    pub per_class: BTreeMap<Region, ClassScore>,
}

impl EvalReport {
    /// JSON document including the campaign-style summary block whose keys
    /// are the two reported columns: "F1-score (macro)" and "Avg Km".
    pub fn to_json_value(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["summary"] = serde_json::json!({
            "F1-score (macro)": self.macro_f1,
            "Avg Km": self.avg_km,
        });
        value
    }

    pub fn to_json_pretty(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("valid json");
        s.push('\n');
        s
    }

    /// Flat CSV (header plus one row) carrying the two campaign columns
    /// alongside the diagnostics.
    pub fn to_csv(&self) -> String {
        format!(
            "n,\"F1-score (macro)\",\"Avg Km\",micro_f1,parse_failure_rate\n{},{},{},{},{}\n",
            self.n, self.macro_f1, self.avg_km, self.micro_f1, self.parse_failure_rate
        )
    }
}

/// Score aligned predictions against gold records: classification metrics,
/// average km error, and the share of fallback (unparseable) predictions.
pub fn evaluate(preds: &[Prediction], golds: &[Record]) -> Result<EvalReport, MetricsError> {
    check_lengths(preds.len(), golds.len(), "evaluate")?;
    let pred_regions: Vec<Region> = preds.iter().map(|p| p.region).collect();
    let gold_regions: Vec<Region> = golds.iter().map(|g| g.region).collect();

    let counts = class_counts(&pred_regions, &gold_regions);
    let mut per_class = BTreeMap::new();
    let mut support: BTreeMap<Region, usize> = BTreeMap::new();
    for &g in &gold_regions {
        *support.entry(g).or_insert(0) += 1;
    }
    for (&class, &n_gold) in &support {
        let &(tp, fp, fn_) = counts.get(&class).expect("gold class counted");
        let (precision, recall, f1) = f1_from_counts(tp, fp, fn_);
        per_class.insert(class, ClassScore { precision, recall, f1, support: n_gold });
    }
    let macro_f1 =
        per_class.values().map(|s| s.f1).sum::<f64>() / per_class.len() as f64;
    let micro_f1 = f1_micro(&pred_regions, &gold_regions)?;
    let avg_km = avg_distance_error(preds, golds)?;
    let fallbacks = preds.iter().filter(|p| p.parse_status == ParseStatus::Fallback).count();

    Ok(EvalReport {
        n: golds.len(),
        macro_f1,
        micro_f1,
        avg_km,
        parse_failure_rate: fallbacks as f64 / preds.len() as f64,
        per_class,
    })
}

//! Center location error metrics.

use crate::error::{Error, Result};
use crate::io::records::{RecordRow, TruthBox};

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsReport {
    /// Mean Euclidean distance between predicted and true box centers.
    pub mean_cle: f64,
    /// Fraction of frames with error at or below the threshold.
    pub precision: f64,
    pub threshold: f64,
    pub frames_evaluated: usize,
}

/// Per-frame center location error: distance between the centers of the
/// predicted and ground-truth boxes (center = top-left + half size).
pub fn center_errors(records: &[RecordRow], truth: &[TruthBox]) -> Result<Vec<f64>> {
    if records.len() != truth.len() {
        return Err(Error::invalid_input(format!(
            "record count {} does not match truth count {}",
            records.len(),
            truth.len()
        )));
    }
    if records.is_empty() {
        return Err(Error::invalid_input("nothing to evaluate"));
    }
    Ok(records
        .iter()
        .zip(truth.iter())
        .map(|(r, t)| {
            let rcx = r.x + r.w as f64 / 2.0;
            let rcy = r.y + r.h as f64 / 2.0;
            let tcx = t.x as f64 + t.w as f64 / 2.0;
            let tcy = t.y as f64 + t.h as f64 / 2.0;
            ((rcx - tcx).powi(2) + (rcy - tcy).powi(2)).sqrt()
        })
        .collect())
}

/// Mean CLE and precision at `threshold`; an error exactly at the threshold
/// counts as a hit.
pub fn evaluate(records: &[RecordRow], truth: &[TruthBox], threshold: f64) -> Result<MetricsReport> {
    if !(threshold >= 0.0) || !threshold.is_finite() {
        return Err(Error::invalid_input(format!(
            "threshold must be finite and nonnegative, got {}",
            threshold
        )));
    }
    let errors = center_errors(records, truth)?;
    let n = errors.len();
    let mean_cle = errors.iter().sum::<f64>() / n as f64;
    let hits = errors.iter().filter(|&&e| e <= threshold).count();
    Ok(MetricsReport {
        mean_cle,
        precision: hits as f64 / n as f64,
        threshold,
        frames_evaluated: n,
    })
}

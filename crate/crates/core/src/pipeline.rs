//! The end-to-end detector: graphs in, scores and flags out.
//!
//! Stages: structural features per snapshot, automatic time-series fits per
//! feature, robust scaling, projection to two dimensions, kernel density,
//! and a fitted tail over the resulting unusualness measure.

use serde::Serialize;
use thiserror::Error;

use crate::arima::{residual_matrix, ArimaModel};
use crate::evt::{abs_log_density, anomaly_scores, classify, fit_gpd_tail, kde2d_density, GpdFit};
use crate::features::extract_sequence;
use crate::graph::GraphSnapshot;
use crate::residual::{robust_pca_2d, scale_residuals, Embedding2D};

/// Fewest snapshots the detector accepts; shorter sequences leave too little
/// history for the time-series fits and the tail threshold.
pub const MIN_SEQUENCE_LENGTH: usize = 20;

#[derive(Debug, Clone, Copy)]
pub struct DetectConfig {
    /// Classification threshold on the score scale; 0.95 flags scores whose
    /// fitted tail probability is in the most extreme 5% of the exceedance
    /// region.
    pub classification_threshold: f64,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self {
            classification_threshold: 0.95,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum DetectError {
    #[error("sequence of {len} snapshots is too short; at least {MIN_SEQUENCE_LENGTH} are required")]
    SequenceTooShort { len: usize },
}

/// Everything the detector fitted along the way, kept for inspection.
#[derive(Debug, Clone, Serialize)]
pub struct Diagnostics {
    /// Per-feature time-series models, in feature order.
    pub models: Vec<ArimaModel>,
    /// The tail fit over the unusualness measure.
    pub tail: GpdFit,
}

/// Result of running the detector over a snapshot sequence.
#[derive(Debug, Clone)]
pub struct Detection {
    /// Unusualness measure per snapshot (absolute log density).
    pub v: Vec<f64>,
    /// Anomaly score per snapshot, in `[0, 1]`.
    pub scores: Vec<f64>,
    /// Classification per snapshot at the configured threshold.
    pub flagged: Vec<bool>,
    /// The 2-D embedding the densities were computed in.
    pub embedding: Embedding2D,
    pub diagnostics: Diagnostics,
}

/// Runs the full detector.
pub fn detect(graphs: &[GraphSnapshot], config: &DetectConfig) -> Result<Detection, DetectError> {
    if graphs.len() < MIN_SEQUENCE_LENGTH {
        return Err(DetectError::SequenceTooShort { len: graphs.len() });
    }
    let features = extract_sequence(graphs);
    let (residuals, models) = residual_matrix(&features);
    let scaled = scale_residuals(&residuals);
    let embedding = robust_pca_2d(&scaled);
    let density = kde2d_density(&embedding.points);
    let v = abs_log_density(&density);
    let tail = fit_gpd_tail(&v);
    let scores = anomaly_scores(&v, &tail);
    let flagged = classify(&scores, &tail, config.classification_threshold);
    Ok(Detection {
        v,
        scores,
        flagged,
        embedding,
        diagnostics: Diagnostics { models, tail },
    })
}

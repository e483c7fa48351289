//! Ranking metrics for comparing detectors.

use serde::Serialize;
use thiserror::Error;

use crate::features::percentile;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("scores ({scores}) and labels ({labels}) have different lengths")]
    LengthMismatch { scores: usize, labels: usize },
    #[error("area under the curve needs both a positive and a negative example")]
    SingleClass,
}

/// Area under the ROC curve via the rank-sum formulation.
///
/// Ties in the scores contribute half, exactly as the trapezoidal area under
/// the empirical ROC curve does.
pub fn auc(scores: &[f64], labels: &[bool]) -> Result<f64, EvalError> {
    if scores.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            scores: scores.len(),
            labels: labels.len(),
        });
    }
    let positives = labels.iter().filter(|&&l| l).count();
    let negatives = labels.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(EvalError::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // Average ranks over tied score groups, 1-based.
    let mut rank_sum_positive = 0.0f64;
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && scores[order[end]] == scores[order[start]] {
            end += 1;
        }
        let average_rank = (start + 1 + end) as f64 / 2.0;
        for &index in &order[start..end] {
            if labels[index] {
                rank_sum_positive += average_rank;
            }
        }
        start = end;
    }

    let p = positives as f64;
    let u = rank_sum_positive - p * (p + 1.0) / 2.0;
    Ok(u / (p * negatives as f64))
}

/// Five-number summary used for the experiment result tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoxplotStats {
    pub min: f64,
    pub q25: f64,
    pub median: f64,
    pub q75: f64,
    pub max: f64,
}

/// Summary of a sample; an empty sample yields all zeros.
pub fn boxplot_stats(values: &[f64]) -> BoxplotStats {
    if values.is_empty() {
        return BoxplotStats {
            min: 0.0,
            q25: 0.0,
            median: 0.0,
            q75: 0.0,
            max: 0.0,
        };
    }
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    BoxplotStats {
        min,
        q25: percentile(values, 25.0),
        median: percentile(values, 50.0),
        q75: percentile(values, 75.0),
        max,
    }
}

//! Comparison detectors: Laplacian spectral change scores and a rank-one
//! tensor factorisation of the whole sequence.
//!
//! Both operate on the same snapshot sequences as the main pipeline and
//! return one score per time step, larger meaning more anomalous, so they can
//! be ranked with the same evaluation code.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::graph::GraphSnapshot;

/// Convergence tolerance on the fit of the tensor factorisation.
const ALS_TOL: f64 = 1e-8;

/// Sweep cap for the tensor factorisation.
const ALS_MAX_SWEEPS: usize = 200;

/// Configuration of the Laplacian baseline.
#[derive(Debug, Clone, Copy)]
pub struct LadConfig {
    /// Number of leading Laplacian singular values kept per snapshot;
    /// clamped to the padded vertex count.
    pub k: usize,
    /// Length of the sliding context window, in past snapshots.
    pub window: usize,
}

impl Default for LadConfig {
    fn default() -> Self {
        Self { k: 6, window: 10 }
    }
}

/// Laplacian anomaly scores for a snapshot sequence.
#[derive(Debug, Clone)]
pub struct LadScores {
    /// Dissimilarity of each snapshot's spectral signature to its recent
    /// context, in `[0, 1]`.
    pub z: Vec<f64>,
    /// Positive part of the first difference of `z`, which suppresses the
    /// elevated plateau that follows a change point.
    pub z_diff: Vec<f64>,
}

/// Spectral signature of one snapshot: the `k` largest singular values of
/// its Laplacian, unit-normalised. Zero spectra stay zero.
fn laplacian_signature(graph: &GraphSnapshot, padded_n: usize, k: usize) -> Vec<f64> {
    let mut laplacian = DMatrix::<f64>::zeros(padded_n, padded_n);
    for &(u, v) in graph.edges() {
        let (u, v) = (u as usize, v as usize);
        laplacian[(u, v)] = -1.0;
        laplacian[(v, u)] = -1.0;
        laplacian[(u, u)] += 1.0;
        laplacian[(v, v)] += 1.0;
    }
    let mut singular: Vec<f64> = laplacian.singular_values().iter().copied().collect();
    singular.sort_by(|a, b| b.total_cmp(a));
    singular.resize(k, 0.0);
    let norm: f64 = singular.iter().map(|s| s * s).sum::<f64>().sqrt();
    if norm > 0.0 {
        singular.iter_mut().for_each(|s| *s /= norm);
    }
    singular
}

/// Scores each snapshot by how far its Laplacian spectrum moves away from
/// the typical spectrum of a sliding window of recent snapshots.
///
/// The typical spectrum is the top left singular vector of the matrix whose
/// columns are the signatures of up to `window + 1` preceding snapshots;
/// the score is one minus the absolute cosine between it and the current
/// signature. The first snapshot has no context and scores 0.
pub fn lad_scores(graphs: &[GraphSnapshot], config: &LadConfig) -> LadScores {
    let t_len = graphs.len();
    let padded_n = graphs.iter().map(GraphSnapshot::num_vertices).max().unwrap_or(0);
    let k = config.k.max(1).min(padded_n.max(1));
    let window = config.window.max(2);
    let signatures: Vec<Vec<f64>> = graphs
        .par_iter()
        .map(|g| laplacian_signature(g, padded_n, k))
        .collect();

    let mut z = vec![0.0f64; t_len];
    for t in 1..t_len {
        let start = t.saturating_sub(window + 1);
        let context = &signatures[start..t];
        let mut matrix = DMatrix::<f64>::zeros(k, context.len());
        for (col, signature) in context.iter().enumerate() {
            for (row, &value) in signature.iter().enumerate() {
                matrix[(row, col)] = value;
            }
        }
        let svd = matrix.svd(true, false);
        let u = svd.u.as_ref().expect("left singular vectors requested");
        let typical: Vec<f64> = (0..k).map(|row| u[(row, 0)]).collect();
        let current = &signatures[t];
        if current.iter().all(|&s| s == 0.0) {
            continue;
        }
        let cosine: f64 = typical
            .iter()
            .zip(current)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .abs();
        z[t] = (1.0 - cosine).clamp(0.0, 1.0);
    }

    let mut z_diff = vec![0.0f64; t_len];
    for t in 1..t_len {
        z_diff[t] = (z[t] - z[t - 1]).max(0.0);
    }
    LadScores { z, z_diff }
}

/// One nonzero cell of a sparse third-order tensor.
type TensorEntry = (usize, usize, usize, f64);

/// Rank-one alternating-least-squares factorisation of a sparse tensor.
///
/// Returns the (unnormalised) temporal factor and the fit after each sweep,
/// where fit is one minus the relative reconstruction error. Factors over the
/// first two modes are kept unit length; the scale lives in the temporal
/// factor, whose update is the exact least-squares solution, so the fit is
/// non-decreasing across sweeps.
pub(crate) fn rank1_als(
    entries: &[TensorEntry],
    dims: (usize, usize, usize),
) -> (Vec<f64>, Vec<f64>) {
    let (n1, n2, n3) = dims;
    if entries.is_empty() || n1 == 0 || n2 == 0 || n3 == 0 {
        return (vec![0.0; n3], Vec::new());
    }
    let norm_x_sq: f64 = entries.iter().map(|&(_, _, _, v)| v * v).sum();
    let mut u1 = vec![1.0 / (n1 as f64).sqrt(); n1];
    let mut u2 = vec![1.0 / (n2 as f64).sqrt(); n2];
    let mut u3 = vec![1.0f64; n3];

    let normalise = |v: &mut Vec<f64>| {
        let norm: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
    };

    let mut fits = Vec::new();
    let mut previous_fit = f64::NEG_INFINITY;
    for _ in 0..ALS_MAX_SWEEPS {
        u1.iter_mut().for_each(|x| *x = 0.0);
        for &(i, j, t, val) in entries {
            u1[i] += val * u2[j] * u3[t];
        }
        normalise(&mut u1);

        u2.iter_mut().for_each(|x| *x = 0.0);
        for &(i, j, t, val) in entries {
            u2[j] += val * u1[i] * u3[t];
        }
        normalise(&mut u2);

        u3.iter_mut().for_each(|x| *x = 0.0);
        for &(i, j, t, val) in entries {
            u3[t] += val * u1[i] * u2[j];
        }

        let inner: f64 = entries
            .iter()
            .map(|&(i, j, t, val)| val * u1[i] * u2[j] * u3[t])
            .sum();
        let norm_u3_sq: f64 = u3.iter().map(|x| x * x).sum();
        let err_sq = (norm_x_sq - 2.0 * inner + norm_u3_sq).max(0.0);
        let fit = 1.0 - (err_sq.sqrt() / norm_x_sq.sqrt());
        fits.push(fit);
        if (fit - previous_fit).abs() < ALS_TOL {
            break;
        }
        previous_fit = fit;
    }
    (u3, fits)
}

fn adjacency_entries(graphs: &[GraphSnapshot]) -> (Vec<TensorEntry>, (usize, usize, usize)) {
    let t_len = graphs.len();
    let n = graphs.iter().map(GraphSnapshot::num_vertices).max().unwrap_or(0);
    let mut entries = Vec::new();
    for (t, graph) in graphs.iter().enumerate() {
        for &(u, v) in graph.edges() {
            entries.push((u as usize, v as usize, t, 1.0));
            entries.push((v as usize, u as usize, t, 1.0));
        }
    }
    (entries, (n, n, t_len))
}

/// Scores each snapshot by how far its temporal factor in a rank-one tensor
/// decomposition sits from the bulk.
///
/// The sequence's adjacency matrices are stacked into an `n x n x T` tensor,
/// factorised, and the temporal factor is converted to robust deviations:
/// `|u3_t - median| / (mad + 1e-12)` with an unscaled median absolute
/// deviation. A sequence with no edges scores 0 everywhere.
pub fn tensorsplat_scores(graphs: &[GraphSnapshot]) -> Vec<f64> {
    let (entries, dims) = adjacency_entries(graphs);
    let (u3, _) = rank1_als(&entries, dims);
    if entries.is_empty() {
        return vec![0.0; graphs.len()];
    }
    let mut sorted = u3.clone();
    sorted.sort_by(f64::total_cmp);
    let median = |values: &[f64]| -> f64 {
        let mid = values.len() / 2;
        if values.len() % 2 == 1 {
            values[mid]
        } else {
            0.5 * (values[mid - 1] + values[mid])
        }
    };
    let center = median(&sorted);
    let mut deviations: Vec<f64> = u3.iter().map(|x| (x - center).abs()).collect();
    let mut sorted_dev = deviations.clone();
    sorted_dev.sort_by(f64::total_cmp);
    let mad = median(&sorted_dev);
    deviations.iter_mut().for_each(|d| *d /= mad + 1e-12);
    deviations
}

//! Automatic ARIMA fitting for the per-feature time series.
//!
//! Models are fit by conditional sum of squares: after differencing `d`
//! times, the innovation recursion
//!
//! ```text
//! e_t = w_t - c - sum_i phi_i * w_(t-i) - sum_j theta_j * e_(t-j)
//! ```
//!
//! is run over the whole differenced series, with pre-sample `w` values
//! replaced by the differenced-series mean and pre-sample innovations by 0.
//! The Gaussian likelihood is profiled over the innovation variance, so the
//! optimiser only searches intercept and AR/MA coefficients. Parameter points
//! whose AR or MA polynomial has a root with modulus <= 1.001 are rejected
//! outright, which enforces stationarity and invertibility with a small
//! safety margin.
//!
//! Order search: `d` is the smallest amount of differencing (up to 2) after
//! which one more difference no longer shrinks the sample standard deviation
//! by more than 5%, and `(p, q)` then minimise the small-sample corrected
//! AICc over the grid `0..=3 x 0..=3`, ties going to fewer parameters and
//! then to fewer AR terms.

use nalgebra::{Complex, DMatrix, DVector};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::features::{FeatureMatrix, NUM_FEATURES};
use crate::optim::{nelder_mead, NelderMeadOptions};

/// Largest AR order considered by the automatic search.
pub const MAX_P: usize = 3;
/// Largest MA order considered by the automatic search.
pub const MAX_Q: usize = 3;
/// Largest differencing order considered by the automatic search.
pub const MAX_D: usize = 2;

/// Roots of the AR/MA polynomials must have modulus strictly above this.
const ROOT_MARGIN: f64 = 1.001;

/// Variance ratio below which another difference is considered worthwhile.
const DIFFERENCE_IMPROVEMENT: f64 = 0.95;

/// Columns whose differenced standard deviation is below this are treated as
/// constant.
const CONSTANT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
}

impl ArimaOrder {
    pub fn new(p: usize, d: usize, q: usize) -> Self {
        Self { p, d, q }
    }
}

/// A fitted model for one feature column.
#[derive(Debug, Clone, Serialize)]
pub struct ArimaModel {
    pub order: ArimaOrder,
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    /// Innovation variance, `SSE / N` on the differenced scale.
    pub sigma2: f64,
    pub log_likelihood: f64,
    pub aicc: f64,
    /// True when optimisation failed and the mean model was substituted.
    pub fallback: bool,
}

#[derive(Debug, Error, PartialEq)]
pub enum ArimaError {
    #[error("order (p={p}, d={d}, q={q}) outside the supported search space")]
    OrderOutOfRange { p: usize, d: usize, q: usize },
    #[error("series of length {len} is too short to fit after differencing {d} times")]
    SeriesTooShort { len: usize, d: usize },
}

/// Applies `d` rounds of first differencing.
pub fn difference(series: &[f64], d: usize) -> Vec<f64> {
    let mut out = series.to_vec();
    for _ in 0..d {
        if out.len() <= 1 {
            return Vec::new();
        }
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    out
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Smallest modulus among the roots of `1 + coeffs[0] z + coeffs[1] z^2 + ...`.
///
/// Returns `+inf` when the polynomial is (numerically) constant. Degrees one
/// and two are solved in closed form; degree three goes through the companion
/// matrix.
fn min_root_modulus(coeffs: &[f64]) -> f64 {
    let mut degree = coeffs.len();
    while degree > 0 && coeffs[degree - 1].abs() < 1e-14 {
        degree -= 1;
    }
    match degree {
        0 => f64::INFINITY,
        1 => 1.0 / coeffs[0].abs(),
        2 => {
            // a z^2 + b z + 1 = 0
            let (a, b) = (coeffs[1], coeffs[0]);
            let disc = Complex::new(b * b - 4.0 * a, 0.0).sqrt();
            let r1 = (Complex::new(-b, 0.0) + disc) / Complex::new(2.0 * a, 0.0);
            let r2 = (Complex::new(-b, 0.0) - disc) / Complex::new(2.0 * a, 0.0);
            r1.norm().min(r2.norm())
        }
        _ => {
            let monic: Vec<f64> = (0..degree)
                .map(|i| {
                    let c = if i == 0 { 1.0 } else { coeffs[i - 1] };
                    c / coeffs[degree - 1]
                })
                .collect();
            let mut companion = DMatrix::<f64>::zeros(degree, degree);
            for row in 1..degree {
                companion[(row, row - 1)] = 1.0;
            }
            for (row, c) in monic.iter().enumerate() {
                companion[(row, degree - 1)] = -c;
            }
            companion
                .complex_eigenvalues()
                .iter()
                .map(|z| z.norm())
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn ar_is_stationary(ar: &[f64]) -> bool {
    let coeffs: Vec<f64> = ar.iter().map(|&phi| -phi).collect();
    min_root_modulus(&coeffs) > ROOT_MARGIN
}

fn ma_is_invertible(ma: &[f64]) -> bool {
    min_root_modulus(ma) > ROOT_MARGIN
}

/// Innovations of the conditional recursion on an already differenced series.
fn innovations(w: &[f64], presample: f64, intercept: f64, ar: &[f64], ma: &[f64]) -> Vec<f64> {
    let n = w.len();
    let mut eps = vec![0.0f64; n];
    for t in 0..n {
        let mut pred = intercept;
        for (i, &phi) in ar.iter().enumerate() {
            let lag = i + 1;
            let value = if t >= lag { w[t - lag] } else { presample };
            pred += phi * value;
        }
        for (j, &theta) in ma.iter().enumerate() {
            let lag = j + 1;
            if t >= lag {
                pred += theta * eps[t - lag];
            }
        }
        eps[t] = w[t] - pred;
    }
    eps
}

fn gaussian_log_likelihood(sse: f64, n: usize) -> f64 {
    let sigma2 = (sse / n as f64).max(f64::MIN_POSITIVE);
    -0.5 * n as f64 * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0)
}

fn aicc_from_log_likelihood(log_likelihood: f64, p: usize, q: usize, n: usize) -> f64 {
    let k = (p + q + 2) as f64;
    let n = n as f64;
    if n - k - 1.0 <= 0.0 {
        return f64::INFINITY;
    }
    -2.0 * log_likelihood + 2.0 * k + 2.0 * k * (k + 1.0) / (n - k - 1.0)
}

impl ArimaModel {
    /// Conditional log-likelihood of this model's coefficients on `series`.
    ///
    /// Recomputing this on the training series reproduces the stored
    /// `log_likelihood` (and through it the AICc).
    pub fn log_likelihood_on(&self, series: &[f64]) -> f64 {
        let w = difference(series, self.order.d);
        if w.is_empty() {
            return f64::NEG_INFINITY;
        }
        let eps = innovations(&w, mean(&w), self.intercept, &self.ar, &self.ma);
        let sse: f64 = eps.iter().map(|e| e * e).sum();
        gaussian_log_likelihood(sse, w.len())
    }
}

/// Fits a single ARIMA(p, d, q) by conditional sum of squares.
pub fn fit_arima(series: &[f64], order: ArimaOrder) -> Result<ArimaModel, ArimaError> {
    let ArimaOrder { p, d, q } = order;
    if p > MAX_P || q > MAX_Q || d > MAX_D {
        return Err(ArimaError::OrderOutOfRange { p, d, q });
    }
    let w = difference(series, d);
    let n = w.len();
    if n < 2 || n <= p.max(q) {
        return Err(ArimaError::SeriesTooShort {
            len: series.len(),
            d,
        });
    }
    let w_mean = mean(&w);

    if p == 0 && q == 0 {
        // The mean model has a closed-form optimum.
        let intercept = w_mean;
        let sse: f64 = w.iter().map(|v| (v - intercept) * (v - intercept)).sum();
        let log_likelihood = gaussian_log_likelihood(sse, n);
        return Ok(ArimaModel {
            order,
            intercept,
            ar: Vec::new(),
            ma: Vec::new(),
            sigma2: sse / n as f64,
            log_likelihood,
            aicc: aicc_from_log_likelihood(log_likelihood, 0, 0, n),
            fallback: false,
        });
    }

    // Optimise on the centred differenced series. This is an exact
    // reparameterisation (the innovations are unchanged when the intercept is
    // translated back below) but it removes the long diagonal valley that
    // couples the intercept to the AR coefficients when the series mean is
    // large, and it makes the fit invariant to level shifts.
    let wc: Vec<f64> = w.iter().map(|v| v - w_mean).collect();

    let objective = |params: &[f64]| -> f64 {
        let intercept = params[0];
        let ar = &params[1..1 + p];
        let ma = &params[1 + p..1 + p + q];
        if !ar_is_stationary(ar) || !ma_is_invertible(ma) {
            return f64::INFINITY;
        }
        let eps = innovations(&wc, 0.0, intercept, ar, ma);
        let sse: f64 = eps.iter().map(|e| e * e).sum();
        -gaussian_log_likelihood(sse, n)
    };

    let dim = 1 + p + q;
    // On the centred scale the zero vector doubles as the mean-model start.
    let mut starts: Vec<Vec<f64>> = vec![vec![0.0; dim]];
    if p > 0 {
        if let Some(ols) = ols_ar_start(&wc, p, q) {
            starts.push(ols);
        }
    }

    let options = NelderMeadOptions::default();
    let mut best: Option<crate::optim::OptimResult> = None;
    for start in &starts {
        let result = nelder_mead(objective, start, options);
        let better = match &best {
            Some(current) => result.value < current.value,
            None => true,
        };
        if better {
            best = Some(result);
        }
    }
    let best = best.expect("at least one start");
    if !best.value.is_finite() {
        // No feasible point was ever found; report the mean model, flagged.
        let mut fallback = fit_arima(series, ArimaOrder::new(0, d, 0))?;
        fallback.fallback = true;
        return Ok(fallback);
    }
    let ar = best.x[1..1 + p].to_vec();
    let ma = best.x[1 + p..1 + p + q].to_vec();
    let intercept = best.x[0] + w_mean * (1.0 - ar.iter().sum::<f64>());
    let eps = innovations(&w, w_mean, intercept, &ar, &ma);
    let sse: f64 = eps.iter().map(|e| e * e).sum();
    let log_likelihood = gaussian_log_likelihood(sse, n);
    Ok(ArimaModel {
        order,
        intercept,
        ar,
        ma,
        sigma2: sse / n as f64,
        log_likelihood,
        aicc: aicc_from_log_likelihood(log_likelihood, p, q, n),
        fallback: false,
    })
}

/// Least-squares autoregression used as an optimiser start: regress `w_t` on
/// an intercept and its first `p` lags, shrink towards zero if the estimate
/// lands outside the stationary region.
fn ols_ar_start(w: &[f64], p: usize, q: usize) -> Option<Vec<f64>> {
    let n = w.len();
    if n <= p + 1 {
        return None;
    }
    let rows = n - p;
    let mut design = DMatrix::<f64>::zeros(rows, p + 1);
    let mut target = DVector::<f64>::zeros(rows);
    for t in p..n {
        let row = t - p;
        design[(row, 0)] = 1.0;
        for i in 0..p {
            design[(row, i + 1)] = w[t - 1 - i];
        }
        target[row] = w[t];
    }
    let solution = design.svd(true, true).solve(&target, 1e-12).ok()?;
    let mut start = vec![0.0; 1 + p + q];
    start[0] = solution[0];
    let mut ar: Vec<f64> = (0..p).map(|i| solution[i + 1]).collect();
    for _ in 0..60 {
        if ar_is_stationary(&ar) {
            break;
        }
        for phi in &mut ar {
            *phi *= 0.9;
        }
    }
    if !ar_is_stationary(&ar) {
        ar.iter_mut().for_each(|phi| *phi = 0.0);
    }
    start[1..1 + p].copy_from_slice(&ar);
    Some(start)
}

/// Chooses the differencing order by the variance-reduction rule.
fn select_d(series: &[f64]) -> usize {
    let mut current = series.to_vec();
    for d in 0..MAX_D {
        let next = difference(&current, 1);
        let sd_now = sample_std(&current);
        let sd_next = sample_std(&next);
        if sd_next >= DIFFERENCE_IMPROVEMENT * sd_now {
            return d;
        }
        current = next;
    }
    MAX_D
}

/// Automatic order selection: variance rule for `d`, exhaustive AICc search
/// for `(p, q)`.
pub fn select_order(series: &[f64]) -> ArimaOrder {
    auto_fit(series).order
}

/// Selects an order and fits it, falling back to a flagged mean model if the
/// search produces nothing usable.
pub fn auto_fit(series: &[f64]) -> ArimaModel {
    if sample_std(series) < CONSTANT_TOL {
        // Constant column: the mean model is exact.
        let intercept = mean(series);
        return ArimaModel {
            order: ArimaOrder::new(0, 0, 0),
            intercept,
            ar: Vec::new(),
            ma: Vec::new(),
            sigma2: 0.0,
            log_likelihood: gaussian_log_likelihood(0.0, series.len().max(1)),
            aicc: aicc_from_log_likelihood(
                gaussian_log_likelihood(0.0, series.len().max(1)),
                0,
                0,
                series.len().max(1),
            ),
            fallback: false,
        };
    }
    let d = select_d(series);

    // Grid in tie-break priority order: fewer parameters first, then fewer AR
    // terms, so a strict comparison keeps the preferred candidate on ties.
    let mut grid: Vec<(usize, usize)> = Vec::new();
    for p in 0..=MAX_P {
        for q in 0..=MAX_Q {
            grid.push((p, q));
        }
    }
    grid.sort_by_key(|&(p, q)| (p + q, p, q));

    let mut best: Option<ArimaModel> = None;
    for (p, q) in grid {
        let Ok(model) = fit_arima(series, ArimaOrder::new(p, d, q)) else {
            continue;
        };
        if model.fallback {
            continue;
        }
        let better = match &best {
            Some(current) => model.aicc < current.aicc,
            None => true,
        };
        if better {
            best = Some(model);
        }
    }
    match best {
        Some(model) if model.aicc.is_finite() => model,
        _ => {
            let mut model =
                fit_arima(series, ArimaOrder::new(0, d, 0)).expect("mean model always fits");
            model.fallback = true;
            model
        }
    }
}

/// One-step-ahead in-sample residuals on the original scale.
///
/// The first `d + max(p, q)` entries are warm-up and set to 0; the rest are
/// the innovations of the conditional recursion, which coincide with
/// `x_t - x̂_t` once the differencing is undone against observed history.
pub fn one_step_residuals(model: &ArimaModel, series: &[f64]) -> Vec<f64> {
    let t_len = series.len();
    let d = model.order.d;
    let mut out = vec![0.0f64; t_len];
    let w = difference(series, d);
    if w.is_empty() {
        return out;
    }
    let eps = innovations(&w, mean(&w), model.intercept, &model.ar, &model.ma);
    let warmup = d + model.order.p.max(model.order.q);
    if warmup < t_len {
        out[warmup..].copy_from_slice(&eps[warmup - d..]);
    }
    out
}

/// Per-column automatic fits for a whole feature matrix.
///
/// Returns the residual columns (same layout as [`FeatureMatrix::columns`])
/// and the fitted model for each feature. Constant columns yield all-zero
/// residuals.
pub fn residual_matrix(features: &FeatureMatrix) -> (Vec<Vec<f64>>, Vec<ArimaModel>) {
    let columns = features.columns();
    let fits: Vec<(Vec<f64>, ArimaModel)> = columns
        .par_iter()
        .map(|series| {
            let model = auto_fit(series);
            let residuals = one_step_residuals(&model, series);
            (residuals, model)
        })
        .collect();
    debug_assert_eq!(fits.len(), NUM_FEATURES);
    let mut residuals = Vec::with_capacity(fits.len());
    let mut models = Vec::with_capacity(fits.len());
    for (r, m) in fits {
        residuals.push(r);
        models.push(m);
    }
    (residuals, models)
}

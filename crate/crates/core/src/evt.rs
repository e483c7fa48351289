//! Tail modelling of the embedded residuals.
//!
//! The 2-D embedding is turned into a scalar unusualness measure
//! `v = |ln density|` under a product-Gaussian kernel estimate, and the upper
//! tail of `v` is modelled with a generalised Pareto distribution fitted to
//! the exceedances over the empirical 90th percentile. Scores combine the
//! fitted tail with the empirical distribution below the threshold.

use serde::Serialize;

use crate::features::percentile;

/// Percentile of `v` used as the tail threshold.
const THRESHOLD_PERCENTILE: f64 = 90.0;

/// Below this many exceedances the shape cannot be estimated and the
/// exponential special case is used instead.
const MIN_EXCEEDANCES_FOR_MLE: usize = 5;

/// Fitted shapes this close to zero collapse to the exponential limit.
const XI_COLLAPSE: f64 = 1e-4;

/// Bandwidths are floored here so degenerate coordinates stay finite.
const BANDWIDTH_FLOOR: f64 = 1e-6;

/// Density estimates are floored here before taking logs.
const DENSITY_FLOOR: f64 = 1e-300;

/// A generalised Pareto fit to threshold exceedances.
#[derive(Debug, Clone, Serialize)]
pub struct GpdFit {
    /// The threshold `u` on the `v` scale.
    pub threshold: f64,
    /// Number of observations strictly above the threshold.
    pub num_exceedances: usize,
    /// Scale parameter.
    pub sigma: f64,
    /// Shape parameter; zero in the exponential limit.
    pub xi: f64,
    /// True when the exponential special case was used: too few exceedances,
    /// a fitted shape indistinguishable from zero, or no interior likelihood
    /// maximum to fit.
    pub exponential_limit: bool,
    /// True when there were no exceedances at all; such a fit flags nothing.
    pub degenerate: bool,
}

/// Product-Gaussian kernel density estimate at each of the input points.
///
/// Per-coordinate bandwidths follow the normal reference rule for two
/// dimensions, `1.06 * sd * T^(-1/6)`. Every point's own kernel contributes
/// to its density, and results are floored at a tiny positive value so the
/// log never overflows.
pub fn kde2d_density(points: &[[f64; 2]]) -> Vec<f64> {
    let t_len = points.len();
    if t_len == 0 {
        return Vec::new();
    }
    let [h1, h2] = kde_bandwidths(points);
    let norm = 1.0 / (2.0 * std::f64::consts::PI * h1 * h2);
    points
        .iter()
        .map(|p| {
            let total: f64 = points
                .iter()
                .map(|q| {
                    let z1 = (p[0] - q[0]) / h1;
                    let z2 = (p[1] - q[1]) / h2;
                    (-0.5 * (z1 * z1 + z2 * z2)).exp()
                })
                .sum();
            (norm * total / t_len as f64).max(DENSITY_FLOOR)
        })
        .collect()
}

/// Normal reference bandwidths for the two coordinates: `1.06 sd T^(-1/6)`,
/// floored so a constant coordinate does not produce a zero-width kernel.
pub(crate) fn kde_bandwidths(points: &[[f64; 2]]) -> [f64; 2] {
    let t_len = points.len();
    let mut out = [BANDWIDTH_FLOOR; 2];
    if t_len < 2 {
        return out;
    }
    for (coord, slot) in out.iter_mut().enumerate() {
        let mean = points.iter().map(|p| p[coord]).sum::<f64>() / t_len as f64;
        let ss: f64 = points
            .iter()
            .map(|p| (p[coord] - mean) * (p[coord] - mean))
            .sum();
        let sd = (ss / (t_len - 1) as f64).sqrt();
        *slot = (1.06 * sd * (t_len as f64).powf(-1.0 / 6.0)).max(BANDWIDTH_FLOOR);
    }
    out
}

/// The unusualness measure: absolute log density.
pub fn abs_log_density(density: &[f64]) -> Vec<f64> {
    density.iter().map(|d| d.ln().abs()).collect()
}

/// Log-likelihood of exceedances `w` under a GPD with the given parameters.
///
/// Returns `-inf` when the parameters are infeasible (non-positive scale, or
/// an exceedance beyond the support for negative shape).
pub fn gpd_log_likelihood(excesses: &[f64], sigma: f64, xi: f64) -> f64 {
    if sigma <= 0.0 {
        return f64::NEG_INFINITY;
    }
    let k = excesses.len() as f64;
    if xi == 0.0 {
        let sum: f64 = excesses.iter().sum();
        return -k * sigma.ln() - sum / sigma;
    }
    let mut acc = 0.0;
    for &w in excesses {
        let z = xi * w / sigma;
        if 1.0 + z <= 0.0 {
            return f64::NEG_INFINITY;
        }
        acc += z.ln_1p();
    }
    -k * sigma.ln() - (1.0 + 1.0 / xi) * acc
}

/// Probability-weighted-moment estimates, used to seed the root search.
fn pwm_start(excesses: &[f64]) -> (f64, f64) {
    let k = excesses.len();
    let b0 = excesses.iter().sum::<f64>() / k as f64;
    let mut sorted = excesses.to_vec();
    sorted.sort_by(f64::total_cmp);
    // Each order statistic weighted by the fraction of the sample above it.
    let b1 = sorted
        .iter()
        .enumerate()
        .map(|(i, &w)| w * (k - 1 - i) as f64 / (k - 1) as f64)
        .sum::<f64>()
        / k as f64;
    let denom = b0 - 2.0 * b1;
    if denom.abs() < 1e-12 {
        return (b0.max(1e-6), 0.0);
    }
    let xi = 2.0 - b0 / denom;
    let sigma = 2.0 * b0 * b1 / denom;
    if sigma <= 0.0 || !xi.is_finite() {
        (b0.max(1e-6), 0.0)
    } else {
        (sigma, xi.clamp(-0.9, 0.9))
    }
}

/// Mean of `ln(1 + theta * w)` over the excesses and its theta derivative.
///
/// On the ray `xi/sigma = theta` the likelihood is maximised at
/// `xi = mean(ln(1 + theta w))`, which reduces the two-parameter fit to a
/// one-dimensional search over theta.
fn profile_shape(excesses: &[f64], theta: f64) -> (f64, f64) {
    let k = excesses.len() as f64;
    let mut log_sum = 0.0;
    let mut ratio_sum = 0.0;
    for &w in excesses {
        log_sum += (theta * w).ln_1p();
        ratio_sum += w / (1.0 + theta * w);
    }
    (log_sum / k, ratio_sum / k)
}

/// Stationarity measure of the profile likelihood at `theta`; interior
/// optima of the two-parameter likelihood are exactly its zero crossings.
fn profile_gradient(excesses: &[f64], theta: f64) -> f64 {
    let (xi, dxi) = profile_shape(excesses, theta);
    if xi == 0.0 {
        return f64::NAN;
    }
    dxi * (1.0 + 1.0 / xi) - 1.0 / theta
}

/// Maximum-likelihood GPD fit to positive excesses over a threshold.
///
/// The likelihood has no finite maximum when the data look bounded: it grows
/// without limit as the fitted endpoint approaches the sample maximum from
/// above, and any descent method walks into that spike and returns a
/// near-degenerate fit. The fit is therefore restricted to interior
/// stationary points, found exactly by a root search on the profile
/// likelihood in `theta = xi/sigma`: candidate roots are bracketed on a grid
/// over the feasible interval (seeded with the probability-weighted-moment
/// estimate), bisected, and compared by exact log-likelihood against the
/// exponential special case, which wins when no root beats it.
///
/// Fewer than five excesses, or a fitted shape indistinguishable from zero,
/// also produce the exponential special case with the scale set to the mean.
pub fn fit_gpd_excesses(excesses: &[f64]) -> (f64, f64, bool) {
    let k = excesses.len();
    let mean = excesses.iter().sum::<f64>() / k.max(1) as f64;
    if k < MIN_EXCEEDANCES_FOR_MLE || mean <= 0.0 {
        return (mean.max(f64::MIN_POSITIVE), 0.0, true);
    }
    let w_max = excesses.iter().cloned().fold(f64::MIN, f64::max);
    let lower = -1.0 / w_max;

    let mut thetas: Vec<f64> = Vec::with_capacity(330);
    // Uniform coverage of the bounded-tail side, endpoint excluded.
    for i in 1..=160 {
        thetas.push(lower * (1.0 - i as f64 / 161.0));
    }
    // Geometric coverage of the heavy-tail side and the near-zero region on
    // both sides, where roots of near-exponential samples live.
    for i in 0..=80 {
        let magnitude = 10f64.powf(-5.0 + 7.0 * i as f64 / 80.0) / mean;
        thetas.push(magnitude);
        if -magnitude > lower {
            thetas.push(-magnitude);
        }
    }
    let (sigma0, xi0) = pwm_start(excesses);
    if sigma0 > 0.0 {
        let theta0 = xi0 / sigma0;
        if theta0 != 0.0 && theta0 > lower {
            thetas.push(theta0);
        }
    }
    thetas.sort_by(f64::total_cmp);
    thetas.dedup();

    let gradients: Vec<f64> = thetas
        .iter()
        .map(|&theta| profile_gradient(excesses, theta))
        .collect();

    // The exponential limit is always a candidate; roots must beat it.
    let mut best = (mean, 0.0f64, gpd_log_likelihood(excesses, mean, 0.0));
    for i in 1..thetas.len() {
        let (g_lo, g_hi) = (gradients[i - 1], gradients[i]);
        if !g_lo.is_finite() || !g_hi.is_finite() || g_lo.signum() == g_hi.signum() {
            continue;
        }
        let (mut lo, mut hi) = (thetas[i - 1], thetas[i]);
        let mut g_at_lo = g_lo;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let g_mid = profile_gradient(excesses, mid);
            if !g_mid.is_finite() {
                break;
            }
            if g_mid.signum() == g_at_lo.signum() {
                lo = mid;
                g_at_lo = g_mid;
            } else {
                hi = mid;
            }
        }
        let theta = 0.5 * (lo + hi);
        let (xi, _) = profile_shape(excesses, theta);
        let sigma = xi / theta;
        if !sigma.is_finite() || sigma <= 0.0 {
            continue;
        }
        let ll = gpd_log_likelihood(excesses, sigma, xi);
        if ll > best.2 {
            best = (sigma, xi, ll);
        }
    }

    let (sigma, xi, _) = best;
    if xi.abs() < XI_COLLAPSE {
        (mean.max(f64::MIN_POSITIVE), 0.0, true)
    } else {
        (sigma, xi, false)
    }
}

/// Fits the tail of `v`: threshold at the 90th percentile, GPD above it.
pub fn fit_gpd_tail(v: &[f64]) -> GpdFit {
    let threshold = percentile(v, THRESHOLD_PERCENTILE);
    let excesses: Vec<f64> = v
        .iter()
        .filter(|&&value| value > threshold)
        .map(|value| value - threshold)
        .collect();
    if excesses.is_empty() {
        return GpdFit {
            threshold,
            num_exceedances: 0,
            sigma: 0.0,
            xi: 0.0,
            exponential_limit: false,
            degenerate: true,
        };
    }
    let (sigma, xi, exponential_limit) = fit_gpd_excesses(&excesses);
    GpdFit {
        threshold,
        num_exceedances: excesses.len(),
        sigma,
        xi,
        exponential_limit,
        degenerate: false,
    }
}

/// Survival function of the fitted GPD at excess `w >= 0`.
pub fn gpd_survival(fit: &GpdFit, w: f64) -> f64 {
    if w <= 0.0 {
        return 1.0;
    }
    if fit.xi == 0.0 {
        if fit.sigma <= 0.0 {
            return 0.0;
        }
        (-w / fit.sigma).exp()
    } else {
        let z = 1.0 + fit.xi * w / fit.sigma;
        if z <= 0.0 {
            // Beyond the upper endpoint of a bounded-tail fit.
            0.0
        } else {
            z.powf(-1.0 / fit.xi)
        }
    }
}

/// Anomaly scores in `[0, 1]`, larger meaning more unusual.
///
/// Above the threshold the exceedance probability is the exceedance rate
/// times the fitted survival; below it the empirical exceedance proportion is
/// used. The score is one minus that probability, so it is monotone in `v`.
pub fn anomaly_scores(v: &[f64], fit: &GpdFit) -> Vec<f64> {
    let t_len = v.len();
    if t_len == 0 {
        return Vec::new();
    }
    let rate = fit.num_exceedances as f64 / t_len as f64;
    v.iter()
        .map(|&value| {
            let prob = if value > fit.threshold && !fit.degenerate {
                rate * gpd_survival(fit, value - fit.threshold)
            } else {
                v.iter().filter(|&&other| other >= value).count() as f64 / t_len as f64
            };
            (1.0 - prob).clamp(0.0, 1.0)
        })
        .collect()
}

/// Flags the scores whose fitted tail probability is in the extreme
/// `1 - threshold` fraction of the exceedance region.
///
/// A score passes when `score > 1 - rate * (1 - threshold)`, which for tail
/// points is the same as the fitted conditional survival dropping below
/// `1 - threshold`. A degenerate fit has rate zero and flags nothing.
pub fn classify(scores: &[f64], fit: &GpdFit, threshold: f64) -> Vec<bool> {
    let t_len = scores.len();
    if t_len == 0 {
        return Vec::new();
    }
    let rate = fit.num_exceedances as f64 / t_len as f64;
    let cut = 1.0 - rate * (1.0 - threshold);
    scores.iter().map(|&s| s > cut).collect()
}

//! Derivative-free simplex minimisation.
//!
//! A small Nelder-Mead implementation used by the time-series and tail-fit
//! estimators. Constraints are handled by rejection: the objective returns
//! `+inf` (or NaN, which is treated the same) outside the feasible region and
//! the simplex simply never settles there. Parameters follow the classic
//! choices: reflection 1, expansion 2, contraction 0.5, shrink 0.5.

/// Outcome of one minimisation run.
#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
}

/// Configuration for [`nelder_mead`].
#[derive(Debug, Clone, Copy)]
pub struct NelderMeadOptions {
    pub max_iterations: usize,
    /// Stop when the spread of objective values over the simplex is below
    /// this.
    pub tolerance: f64,
    /// Relative size of the initial simplex around the start point.
    pub initial_step: f64,
}

impl Default for NelderMeadOptions {
    fn default() -> Self {
        Self {
            max_iterations: 500,
            tolerance: 1e-8,
            initial_step: 0.1,
        }
    }
}

/// Minimises `f` starting from `x0`.
///
/// Infinite and NaN objective values are legal; they mark infeasible points.
/// If the entire search stays infeasible the returned value is `+inf` and the
/// caller should treat the run as failed.
pub fn nelder_mead(
    f: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    options: NelderMeadOptions,
) -> OptimResult {
    let dim = x0.len();
    let eval = |x: &[f64]| {
        let v = f(x);
        if v.is_nan() {
            f64::INFINITY
        } else {
            v
        }
    };
    if dim == 0 {
        let value = eval(x0);
        return OptimResult {
            x: Vec::new(),
            value,
            iterations: 0,
        };
    }

    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(dim + 1);
    simplex.push((x0.to_vec(), eval(x0)));
    for i in 0..dim {
        let mut point = x0.to_vec();
        point[i] += options.initial_step * point[i].abs().max(1.0);
        let value = eval(&point);
        simplex.push((point, value));
    }

    let mut iterations = 0;
    while iterations < options.max_iterations {
        iterations += 1;
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].1;
        let worst = simplex[dim].1;
        if (worst - best).abs() <= options.tolerance && worst.is_finite() {
            break;
        }

        let centroid: Vec<f64> = (0..dim)
            .map(|j| simplex[..dim].iter().map(|(p, _)| p[j]).sum::<f64>() / dim as f64)
            .collect();
        let worst_point = simplex[dim].0.clone();
        let blend = |towards: &[f64], coeff: f64| -> Vec<f64> {
            centroid
                .iter()
                .zip(towards)
                .map(|(c, w)| c + coeff * (w - c))
                .collect()
        };

        let reflected = blend(&worst_point, -1.0);
        let f_reflected = eval(&reflected);
        if f_reflected < simplex[0].1 {
            let expanded = blend(&worst_point, -2.0);
            let f_expanded = eval(&expanded);
            simplex[dim] = if f_expanded < f_reflected {
                (expanded, f_expanded)
            } else {
                (reflected, f_reflected)
            };
            continue;
        }
        if f_reflected < simplex[dim - 1].1 {
            simplex[dim] = (reflected, f_reflected);
            continue;
        }
        let contracted = if f_reflected < simplex[dim].1 {
            blend(&worst_point, -0.5)
        } else {
            blend(&worst_point, 0.5)
        };
        let f_contracted = eval(&contracted);
        if f_contracted < f_reflected.min(simplex[dim].1) {
            simplex[dim] = (contracted, f_contracted);
            continue;
        }
        // Shrink everything towards the best vertex.
        let best_point = simplex[0].0.clone();
        for entry in simplex.iter_mut().skip(1) {
            for (x, b) in entry.0.iter_mut().zip(&best_point) {
                *x = b + 0.5 * (*x - b);
            }
            entry.1 = eval(&entry.0);
        }
    }

    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (x, value) = simplex.swap_remove(0);
    OptimResult {
        x,
        value,
        iterations,
    }
}

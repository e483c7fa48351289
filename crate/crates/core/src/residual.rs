//! Robust scaling and 2-D projection of the residual matrix.
//!
//! Residual columns arrive on wildly different scales (edge counts vs
//! densities), and the interesting rows are exactly the outliers, so plain
//! standardisation would let a single anomaly inflate its own column scale.
//! Columns are therefore scaled by trimmed moments, and the projection to two
//! dimensions maximises a median-absolute-deviation spread instead of
//! variance.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::features::percentile;

/// Fraction trimmed from each tail before computing column moments.
const TRIM_LOWER: f64 = 2.5;
const TRIM_UPPER: f64 = 97.5;

/// Columns with trimmed standard deviation below this are dropped to zero.
const SCALE_FLOOR: f64 = 1e-12;

/// Number of extra random unit directions tried by the projection search.
const RANDOM_DIRECTIONS: usize = 200;

/// Seed for the random directions; fixed so the projection is deterministic.
const DIRECTION_SEED: u64 = 0x70726f6a32;

/// Consistency factor making the MAD comparable to a standard deviation.
const MAD_CONSISTENCY: f64 = 1.4826;

/// A two-dimensional embedding of the residual rows.
#[derive(Debug, Clone)]
pub struct Embedding2D {
    /// Projected coordinates, one `[f64; 2]` per time step.
    pub points: Vec<[f64; 2]>,
    /// The two projection directions, unit vectors in column space.
    pub directions: [Vec<f64>; 2],
}

/// Mean and standard deviation of the central 95% of a column.
///
/// Values outside `[p2.5, p97.5]` are excluded; the standard deviation uses
/// the `m - 1` denominator over the kept values. Falls back to the untrimmed
/// mean with zero spread when fewer than two values survive.
pub fn trimmed_moments(values: &[f64]) -> (f64, f64) {
    let lo = percentile(values, TRIM_LOWER);
    let hi = percentile(values, TRIM_UPPER);
    let kept: Vec<f64> = values
        .iter()
        .copied()
        .filter(|v| *v >= lo && *v <= hi)
        .collect();
    if kept.len() < 2 {
        let mean = if values.is_empty() {
            0.0
        } else {
            values.iter().sum::<f64>() / values.len() as f64
        };
        return (mean, 0.0);
    }
    let mean = kept.iter().sum::<f64>() / kept.len() as f64;
    let ss: f64 = kept.iter().map(|v| (v - mean) * (v - mean)).sum();
    (mean, (ss / (kept.len() - 1) as f64).sqrt())
}

/// Centres and scales each residual column by its trimmed moments.
///
/// Columns whose trimmed spread is below the floor come out as all zeros, so
/// constant features cannot perturb the projection.
pub fn scale_residuals(columns: &[Vec<f64>]) -> Vec<Vec<f64>> {
    columns
        .iter()
        .map(|column| {
            let (mean, sd) = trimmed_moments(column);
            if sd < SCALE_FLOOR {
                vec![0.0; column.len()]
            } else {
                column.iter().map(|v| (v - mean) / sd).collect()
            }
        })
        .collect()
}

fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        sorted[mid]
    } else {
        0.5 * (sorted[mid - 1] + sorted[mid])
    }
}

/// Scaled median absolute deviation of a projection.
fn robust_spread(projected: &[f64]) -> f64 {
    let med = median(projected);
    let deviations: Vec<f64> = projected.iter().map(|v| (v - med).abs()).collect();
    MAD_CONSISTENCY * median(&deviations)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn project_rows(rows: &[Vec<f64>], direction: &[f64]) -> Vec<f64> {
    rows.iter().map(|row| dot(row, direction)).collect()
}

/// A unit vector orthogonal to `first`: the coordinate axis least aligned
/// with it, re-orthogonalised.
fn orthogonal_axis(first: &[f64]) -> Vec<f64> {
    let dim = first.len();
    let k = (0..dim)
        .min_by(|&a, &b| first[a].abs().total_cmp(&first[b].abs()))
        .unwrap_or(0);
    let mut v = vec![0.0; dim];
    if k < dim {
        v[k] = 1.0;
    }
    let along = dot(&v, first);
    for (value, f) in v.iter_mut().zip(first) {
        *value -= along * f;
    }
    let len = norm(&v);
    if len > SCALE_FLOOR {
        v.iter_mut().for_each(|value| *value /= len);
    }
    v
}

/// Picks the unit direction maximising the robust spread of the projections.
///
/// Candidates are the normalised data rows themselves plus a fixed batch of
/// random unit vectors; ties keep the earliest candidate.
fn best_direction(rows: &[Vec<f64>], dim: usize, rng: &mut ChaCha12Rng) -> Option<Vec<f64>> {
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for row in rows {
        let len = norm(row);
        if len > SCALE_FLOOR {
            candidates.push(row.iter().map(|v| v / len).collect());
        }
    }
    for _ in 0..RANDOM_DIRECTIONS {
        let raw: Vec<f64> = (0..dim)
            .map(|_| <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng))
            .collect();
        let len = norm(&raw);
        if len > SCALE_FLOOR {
            candidates.push(raw.iter().map(|v| v / len).collect());
        }
    }
    let mut best: Option<(f64, Vec<f64>)> = None;
    for candidate in candidates {
        let spread = robust_spread(&project_rows(rows, &candidate));
        let better = match &best {
            Some((current, _)) => spread > *current,
            None => true,
        };
        if better {
            best = Some((spread, candidate));
        }
    }
    best.map(|(_, direction)| direction)
}

/// Projects the scaled residual rows onto two robust principal directions.
///
/// Rows are first centred on the coordinate-wise median. The first direction
/// maximises the MAD of the projections; the second repeats the search after
/// removing the first component from every row and is re-orthogonalised
/// against the first. Degenerate input (all rows zero) yields the first two
/// coordinate axes and an all-zero embedding.
pub fn robust_pca_2d(columns: &[Vec<f64>]) -> Embedding2D {
    let dim = columns.len();
    let t_len = columns.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<f64>> = (0..t_len)
        .map(|t| columns.iter().map(|c| c[t]).collect())
        .collect();

    let mut center = vec![0.0; dim];
    for (j, entry) in center.iter_mut().enumerate() {
        let column: Vec<f64> = rows.iter().map(|row| row[j]).collect();
        *entry = median(&column);
    }
    for row in &mut rows {
        for (value, c) in row.iter_mut().zip(&center) {
            *value -= c;
        }
    }

    let axis = |k: usize| {
        let mut v = vec![0.0; dim];
        if k < dim {
            v[k] = 1.0;
        }
        v
    };
    if rows.iter().all(|row| norm(row) <= SCALE_FLOOR) {
        return Embedding2D {
            points: vec![[0.0, 0.0]; t_len],
            directions: [axis(0), axis(1)],
        };
    }

    let mut rng = ChaCha12Rng::seed_from_u64(DIRECTION_SEED);
    let first = best_direction(&rows, dim, &mut rng).unwrap_or_else(|| axis(0));

    let deflated: Vec<Vec<f64>> = rows
        .iter()
        .map(|row| {
            let along = dot(row, &first);
            row.iter()
                .zip(&first)
                .map(|(v, f)| v - along * f)
                .collect()
        })
        .collect();
    let second = if deflated.iter().all(|row| norm(row) <= SCALE_FLOOR) {
        orthogonal_axis(&first)
    } else {
        match best_direction(&deflated, dim, &mut rng) {
            Some(mut direction) => {
                // Remove any residual component along the first direction.
                let along = dot(&direction, &first);
                for (value, f) in direction.iter_mut().zip(&first) {
                    *value -= along * f;
                }
                let len = norm(&direction);
                if len > SCALE_FLOOR {
                    direction.iter_mut().for_each(|v| *v /= len);
                    direction
                } else {
                    orthogonal_axis(&first)
                }
            }
            None => orthogonal_axis(&first),
        }
    };

    let points: Vec<[f64; 2]> = rows
        .iter()
        .map(|row| [dot(row, &first), dot(row, &second)])
        .collect();
    Embedding2D {
        points,
        directions: [first, second],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn trimmed_moments_ignore_extremes() {
        // 1..=100 with the top value replaced by a gross outlier.
        let mut values: Vec<f64> = (1..=100).map(f64::from).collect();
        values[99] = 1e6;
        let (clean_mean, clean_sd) = trimmed_moments(&(1..=100).map(f64::from).collect::<Vec<_>>());
        let (mean, sd) = trimmed_moments(&values);
        // Trimming removes the outlier, so the moments barely move.
        assert!((mean - clean_mean).abs() < 2.0);
        assert!((sd - clean_sd).abs() < 2.0);
        assert!(sd < 40.0);
    }

    #[test]
    fn trimmed_moments_small_inputs() {
        assert_eq!(trimmed_moments(&[]), (0.0, 0.0));
        assert_eq!(trimmed_moments(&[7.0]), (7.0, 0.0));
        // With two values the trim band lies strictly between them, so the
        // fallback applies: untrimmed mean, zero spread.
        assert_eq!(trimmed_moments(&[2.0, 4.0]), (3.0, 0.0));
    }

    #[test]
    fn scaling_zeroes_flat_columns_and_is_affine_exact() {
        let base: Vec<f64> = (0..50).map(|t| (t as f64 * 0.7).sin() * 3.0 + 1.0).collect();
        let flat = vec![4.0; 50];
        let scaled = scale_residuals(&[base.clone(), flat]);
        assert!(scaled[1].iter().all(|&v| v == 0.0));
        // Rescaling already scaled output changes nothing.
        let again = scale_residuals(&scaled);
        for (a, b) in scaled[0].iter().zip(&again[0]) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn median_and_spread_basics() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
        let spread = robust_spread(&[1.0, 2.0, 3.0, 4.0, 100.0]);
        assert!((spread - MAD_CONSISTENCY).abs() < 1e-12);
    }

    #[test]
    fn projection_finds_the_dominant_axis_of_an_anisotropic_cloud() {
        // Points stretched along a known diagonal in 5-D, with a little noise
        // in the remaining coordinates.
        let mut rng = ChaCha12Rng::seed_from_u64(99);
        let dim = 5;
        let axis: Vec<f64> = {
            let raw = [1.0, 2.0, -1.0, 0.5, 0.0];
            let len = norm(&raw);
            raw.iter().map(|v| v / len).collect()
        };
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); dim];
        for _ in 0..400 {
            let along: f64 =
                10.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            for (column, &a) in columns.iter_mut().zip(&axis) {
                let noise: f64 =
                    0.1 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
                column.push(along * a + noise);
            }
        }
        let embedding = robust_pca_2d(&columns);
        let alignment = dot(&embedding.directions[0], &axis).abs();
        assert!(alignment > 0.99, "alignment {alignment}");
        // Second direction is orthogonal to the first.
        let cross = dot(&embedding.directions[0], &embedding.directions[1]).abs();
        assert!(cross < 1e-9);
        for direction in &embedding.directions {
            assert!((norm(direction) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn two_dimensional_input_matches_a_fine_grid_search() {
        // In 2-D the optimal direction can be found by brute force over
        // angles, which gives an independent check on the search.
        let mut rng = ChaCha12Rng::seed_from_u64(4242);
        let t_len = 300;
        let mut columns = vec![Vec::with_capacity(t_len), Vec::with_capacity(t_len)];
        let theta: f64 = 0.6;
        for _ in 0..t_len {
            let along: f64 =
                5.0 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            let across: f64 =
                0.5 * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            columns[0].push(along * theta.cos() - across * theta.sin());
            columns[1].push(along * theta.sin() + across * theta.cos());
        }
        let embedding = robust_pca_2d(&columns);

        let rows: Vec<Vec<f64>> = (0..t_len)
            .map(|t| vec![columns[0][t], columns[1][t]])
            .collect();
        let med0 = median(&columns[0]);
        let med1 = median(&columns[1]);
        let centered: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| vec![r[0] - med0, r[1] - med1])
            .collect();
        let mut best_angle = 0.0;
        let mut best_value = f64::NEG_INFINITY;
        for step in 0..1800 {
            let angle = step as f64 * std::f64::consts::PI / 1800.0;
            let direction = vec![angle.cos(), angle.sin()];
            let value = robust_spread(&project_rows(&centered, &direction));
            if value > best_value {
                best_value = value;
                best_angle = angle;
            }
        }
        let found = robust_spread(&project_rows(&centered, &embedding.directions[0]));
        assert!(
            found >= 0.999 * best_value,
            "search spread {found} vs grid {best_value} at angle {best_angle}"
        );
    }

    #[test]
    fn degenerate_input_yields_axes_and_zeros() {
        let columns = vec![vec![0.0; 10], vec![0.0; 10], vec![0.0; 10]];
        let embedding = robust_pca_2d(&columns);
        assert_eq!(embedding.directions[0], vec![1.0, 0.0, 0.0]);
        assert_eq!(embedding.directions[1], vec![0.0, 1.0, 0.0]);
        assert!(embedding.points.iter().all(|p| p[0] == 0.0 && p[1] == 0.0));
    }

    #[test]
    fn projection_is_deterministic() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let columns: Vec<Vec<f64>> = (0..6)
            .map(|_| (0..80).map(|_| rng.random::<f64>() - 0.5).collect())
            .collect();
        let a = robust_pca_2d(&columns);
        let b = robust_pca_2d(&columns);
        assert_eq!(a.points, b.points);
        assert_eq!(a.directions, b.directions);
    }
}

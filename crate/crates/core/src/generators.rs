//! Random graph families and the four benchmark sequence recipes.
//!
//! All generators draw from a caller-supplied ChaCha12 stream, so a sequence
//! is fully determined by its seed: the same seed yields bit-identical edge
//! lists on every platform and every run. Graphs inside a sequence are
//! generated serially in time order to keep the stream layout stable.
//!
//! The four experiment recipes share a common shape: `t_len` snapshots on `n`
//! vertices, a family parameter that is either constant or drifts linearly
//! over time, and a single anomalous snapshot at `anomaly_time` drawn from the
//! same family with a shifted parameter (for the static recipe the anomalous
//! parameter replaces the base one outright; for the drifting recipes the
//! offset `p_star` is added on top of the base value at that time step).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use std::collections::HashSet;
use thiserror::Error;

use crate::graph::GraphSnapshot;

/// Edges attached by each arriving vertex in the preferential-attachment
/// family.
pub const BA_EDGES_PER_ARRIVAL: usize = 1;

/// Ring-lattice degree in the small-world family.
pub const WS_RING_DEGREE: usize = 4;

/// The four benchmark recipes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentId {
    /// Static Erdos-Renyi, p = 0.05; the anomaly replaces p with `p_star`.
    StaticEr,
    /// Erdos-Renyi with p drifting 0.05 -> 0.50; anomaly adds `p_star`.
    DriftingEr,
    /// Preferential attachment with exponent drifting 1.1 -> 1.9; anomaly
    /// adds `p_star` to the exponent.
    DriftingPa,
    /// Small-world with rewiring probability drifting 0.05 -> 0.30; anomaly
    /// adds `p_star`.
    DriftingSw,
}

impl ExperimentId {
    /// Numeric id 1..=4, used by the CLI and in result files.
    pub fn index(self) -> u8 {
        match self {
            ExperimentId::StaticEr => 1,
            ExperimentId::DriftingEr => 2,
            ExperimentId::DriftingPa => 3,
            ExperimentId::DriftingSw => 4,
        }
    }

    pub fn from_index(index: u8) -> Option<Self> {
        match index {
            1 => Some(ExperimentId::StaticEr),
            2 => Some(ExperimentId::DriftingEr),
            3 => Some(ExperimentId::DriftingPa),
            4 => Some(ExperimentId::DriftingSw),
            _ => None,
        }
    }

    /// The anomaly offsets each recipe accepts.
    pub fn allowed_p_star(self) -> &'static [f64] {
        match self {
            ExperimentId::StaticEr => &[0.10, 0.15, 0.20, 0.25],
            ExperimentId::DriftingEr => &[0.05, 0.10, 0.15, 0.20],
            ExperimentId::DriftingPa => &[0.25, 0.30, 0.35, 0.40],
            ExperimentId::DriftingSw => &[0.05, 0.10, 0.15, 0.20],
        }
    }

    /// Base family parameter at 1-based time `t` in a sequence of `t_len`.
    pub fn base_parameter(self, t: usize, t_len: usize) -> f64 {
        debug_assert!(t >= 1 && t <= t_len && t_len >= 2);
        let ramp = (t - 1) as f64 / (t_len - 1) as f64;
        match self {
            ExperimentId::StaticEr => 0.05,
            ExperimentId::DriftingEr => 0.05 + 0.45 * ramp,
            ExperimentId::DriftingPa => 1.1 + 0.8 * ramp,
            ExperimentId::DriftingSw => 0.05 + 0.25 * ramp,
        }
    }

    /// Family parameter of the anomalous snapshot at time `t`.
    pub fn anomalous_parameter(self, p_star: f64, t: usize, t_len: usize) -> f64 {
        match self {
            ExperimentId::StaticEr => p_star,
            _ => p_star + self.base_parameter(t, t_len),
        }
    }
}

/// Description of one benchmark sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SequenceSpec {
    pub experiment: ExperimentId,
    pub p_star: f64,
    pub seed: u64,
    /// Number of snapshots.
    pub t_len: usize,
    /// Vertices per snapshot.
    pub n: usize,
    /// 1-based index of the anomalous snapshot.
    pub anomaly_time: usize,
}

impl SequenceSpec {
    /// A spec with the benchmark defaults: 100 snapshots of 100 vertices,
    /// anomaly at t = 50.
    pub fn new(experiment: ExperimentId, p_star: f64, seed: u64) -> Self {
        Self {
            experiment,
            p_star,
            seed,
            t_len: 100,
            n: 100,
            anomaly_time: 50,
        }
    }

    pub fn validate(&self) -> Result<(), GeneratorError> {
        if self.t_len < 2 {
            return Err(GeneratorError::SequenceTooShort { t_len: self.t_len });
        }
        if self.anomaly_time < 1 || self.anomaly_time > self.t_len {
            return Err(GeneratorError::AnomalyTimeOutOfRange {
                anomaly_time: self.anomaly_time,
                t_len: self.t_len,
            });
        }
        if self.n < WS_RING_DEGREE + 2 {
            return Err(GeneratorError::TooFewVertices { n: self.n });
        }
        let allowed = self.experiment.allowed_p_star();
        if !allowed.iter().any(|&a| (a - self.p_star).abs() < 1e-9) {
            return Err(GeneratorError::IllegalPStar {
                experiment: self.experiment.index(),
                p_star: self.p_star,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum GeneratorError {
    #[error("sequence length {t_len} is too short; need at least 2 snapshots")]
    SequenceTooShort { t_len: usize },
    #[error("anomaly time {anomaly_time} is outside 1..={t_len}")]
    AnomalyTimeOutOfRange { anomaly_time: usize, t_len: usize },
    #[error("sequences need at least {} vertices per snapshot, got {n}", WS_RING_DEGREE + 2)]
    TooFewVertices { n: usize },
    #[error("p_star {p_star} is not an allowed offset for experiment {experiment}")]
    IllegalPStar { experiment: u8, p_star: f64 },
}

/// A generated sequence with its ground-truth anomaly labels.
#[derive(Debug, Clone)]
pub struct LabeledSequence {
    pub graphs: Vec<GraphSnapshot>,
    pub labels: Vec<bool>,
}

/// Erdos-Renyi G(n, p): each of the n(n-1)/2 possible edges is included
/// independently with probability `p`. Pairs are visited in lexicographic
/// order, one uniform draw each.
pub fn erdos_renyi(n: usize, p: f64, rng: &mut ChaCha12Rng) -> GraphSnapshot {
    let mut edges = Vec::new();
    for u in 0..n as u32 {
        for v in (u + 1)..n as u32 {
            if rng.random::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    GraphSnapshot::new(n, edges).expect("generated edges are always in range")
}

/// Preferential attachment with a tunable exponent.
///
/// Growth starts from a single vertex; each arriving vertex attaches `m`
/// edges to distinct existing vertices sampled without replacement with
/// probability proportional to `(degree + 1)^alpha`. The `+1` keeps isolated
/// vertices reachable, and `alpha = 0` reduces to uniform attachment. The
/// attachment weights for one arrival are computed before any of its edges
/// are added.
pub fn barabasi_albert(n: usize, alpha: f64, m: usize, rng: &mut ChaCha12Rng) -> GraphSnapshot {
    assert!(m >= 1, "each arrival must attach at least one edge");
    assert!(n > m, "need at least m + 1 vertices");
    let mut degrees = vec![0usize; n];
    let mut edges = Vec::new();
    for v in 1..n {
        let m_eff = m.min(v);
        let mut pool: Vec<usize> = (0..v).collect();
        let mut weights: Vec<f64> = pool
            .iter()
            .map(|&i| ((degrees[i] + 1) as f64).powf(alpha))
            .collect();
        let mut targets = Vec::with_capacity(m_eff);
        for _ in 0..m_eff {
            let total: f64 = weights.iter().sum();
            let x = rng.random::<f64>() * total;
            let mut cumulative = 0.0;
            let mut chosen = pool.len() - 1;
            for (idx, &w) in weights.iter().enumerate() {
                cumulative += w;
                if x < cumulative {
                    chosen = idx;
                    break;
                }
            }
            targets.push(pool[chosen]);
            pool.swap_remove(chosen);
            weights.swap_remove(chosen);
        }
        for &t in &targets {
            edges.push((t as u32, v as u32));
            degrees[t] += 1;
            degrees[v] += 1;
        }
    }
    GraphSnapshot::new(n, edges).expect("generated edges are always in range")
}

/// Small-world graph: a ring lattice where each vertex connects to `k/2`
/// neighbours on each side, then every lattice edge is rewired with
/// probability `p_rewire` by redrawing its far endpoint uniformly, avoiding
/// self-loops and duplicate edges. The edge count stays exactly `n * k / 2`.
pub fn watts_strogatz(n: usize, k: usize, p_rewire: f64, rng: &mut ChaCha12Rng) -> GraphSnapshot {
    assert!(k >= 2 && k % 2 == 0, "ring degree must be even and positive");
    assert!(n > k, "need more vertices than the ring degree");
    let canon = |a: u32, b: u32| (a.min(b), a.max(b));
    let mut present: HashSet<(u32, u32)> = HashSet::new();
    for v in 0..n {
        for j in 1..=(k / 2) {
            present.insert(canon(v as u32, ((v + j) % n) as u32));
        }
    }
    let mut degrees = vec![k; n];
    for v in 0..n {
        for j in 1..=(k / 2) {
            let home = v as u32;
            let old = ((v + j) % n) as u32;
            if rng.random::<f64>() >= p_rewire {
                continue;
            }
            if degrees[v] >= n - 1 {
                continue;
            }
            let new = loop {
                let candidate = rng.random_range(0..n as u32);
                if candidate != home && !present.contains(&canon(home, candidate)) {
                    break candidate;
                }
            };
            present.remove(&canon(home, old));
            present.insert(canon(home, new));
            degrees[old as usize] -= 1;
            degrees[new as usize] += 1;
        }
    }
    GraphSnapshot::new(n, present).expect("generated edges are always in range")
}

/// A star: vertex 0 joined to `n_edges` leaves.
pub fn star_graph(n_edges: usize) -> GraphSnapshot {
    let edges = (1..=n_edges as u32).map(|v| (0, v));
    GraphSnapshot::new(n_edges + 1, edges).expect("generated edges are always in range")
}

/// Generates the benchmark sequence described by `spec`, with the anomalous
/// snapshot at `spec.anomaly_time` and labels marking it.
pub fn make_experiment_sequence(spec: &SequenceSpec) -> Result<LabeledSequence, GeneratorError> {
    spec.validate()?;
    let sequence = generate_sequence(spec, true);
    let mut labels = vec![false; spec.t_len];
    labels[spec.anomaly_time - 1] = true;
    Ok(LabeledSequence {
        graphs: sequence,
        labels,
    })
}

/// Generates the same sequence as [`make_experiment_sequence`] but without
/// the planted anomaly; every label is false. Used for false-positive
/// calibration runs.
pub fn make_baseline_sequence(spec: &SequenceSpec) -> Result<LabeledSequence, GeneratorError> {
    spec.validate()?;
    let sequence = generate_sequence(spec, false);
    Ok(LabeledSequence {
        labels: vec![false; sequence.len()],
        graphs: sequence,
    })
}

fn generate_sequence(spec: &SequenceSpec, with_anomaly: bool) -> Vec<GraphSnapshot> {
    let mut rng = ChaCha12Rng::seed_from_u64(spec.seed);
    let mut graphs = Vec::with_capacity(spec.t_len);
    for t in 1..=spec.t_len {
        let param = if with_anomaly && t == spec.anomaly_time {
            spec.experiment
                .anomalous_parameter(spec.p_star, t, spec.t_len)
        } else {
            spec.experiment.base_parameter(t, spec.t_len)
        };
        let graph = match spec.experiment {
            ExperimentId::StaticEr | ExperimentId::DriftingEr => {
                erdos_renyi(spec.n, param, &mut rng)
            }
            ExperimentId::DriftingPa => {
                barabasi_albert(spec.n, param, BA_EDGES_PER_ARRIVAL, &mut rng)
            }
            ExperimentId::DriftingSw => watts_strogatz(spec.n, WS_RING_DEGREE, param, &mut rng),
        };
        graphs.push(graph);
    }
    graphs
}

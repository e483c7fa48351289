//! Benchmark harness: synthetic sequences scored by every detector.
//!
//! One run generates a sequence for each (setting, seed) pair, scores it
//! with the main pipeline and all baselines, and reduces the per-run AUCs to
//! five-number summaries. Everything is deterministic in the base seed, and
//! runs are independent so they parallelise freely.

use rayon::prelude::*;
use serde::Serialize;

use crate::baselines::{lad_scores, tensorsplat_scores, LadConfig};
use crate::eval::{auc, boxplot_stats, BoxplotStats};
use crate::generators::{make_experiment_sequence, ExperimentId, SequenceSpec};
use crate::graph::GraphSnapshot;
use crate::pipeline::{detect, DetectConfig};

/// The detectors compared in the benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Method {
    Proposed,
    Lad,
    LadDiff,
    TensorSplat,
}

impl Method {
    /// All methods, in reporting order.
    pub const ALL: [Method; 4] = [
        Method::Proposed,
        Method::Lad,
        Method::LadDiff,
        Method::TensorSplat,
    ];

    /// Stable identifier used in output files.
    pub fn name(self) -> &'static str {
        match self {
            Method::Proposed => "proposed",
            Method::Lad => "lad",
            Method::LadDiff => "lad_diff",
            Method::TensorSplat => "tensorsplat",
        }
    }
}

/// AUC of one method on one generated sequence.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RunRecord {
    pub p_star: f64,
    pub seed: u64,
    pub method: Method,
    pub auc: f64,
}

/// Distribution of AUCs for one method at one setting.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MethodSummary {
    pub p_star: f64,
    pub method: Method,
    pub stats: BoxplotStats,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub experiment: ExperimentId,
    /// Setting-major, then repeat, then method, so output files are stable.
    pub records: Vec<RunRecord>,
    /// Setting-major, then method.
    pub summaries: Vec<MethodSummary>,
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a base seed with an index path into an independent stream seed.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut state = base;
    for &part in parts {
        state = splitmix64(
            state.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(part.wrapping_add(1))),
        );
    }
    state
}

/// Scores one sequence with every method, in [`Method::ALL`] order.
pub fn score_all_methods(graphs: &[GraphSnapshot]) -> [Vec<f64>; 4] {
    let detection =
        detect(graphs, &DetectConfig::default()).expect("benchmark sequences are long enough");
    let lad = lad_scores(graphs, &LadConfig::default());
    let splat = tensorsplat_scores(graphs);
    [detection.scores, lad.z, lad.z_diff, splat]
}

/// Runs one benchmark experiment: every allowed setting, `repeats` seeds.
pub fn run_experiment(experiment: ExperimentId, repeats: usize, base_seed: u64) -> ExperimentResult {
    let settings = experiment.allowed_p_star();
    let jobs: Vec<(usize, usize)> = (0..settings.len())
        .flat_map(|setting| (0..repeats).map(move |rep| (setting, rep)))
        .collect();

    let scored: Vec<(u64, [f64; 4])> = jobs
        .par_iter()
        .map(|&(setting, rep)| {
            let seed = derive_seed(
                base_seed,
                &[u64::from(experiment.index()), setting as u64, rep as u64],
            );
            let spec = SequenceSpec::new(experiment, settings[setting], seed);
            let sequence = make_experiment_sequence(&spec).expect("benchmark settings are valid");
            let scores = score_all_methods(&sequence.graphs);
            let aucs = scores
                .map(|s| auc(&s, &sequence.labels).expect("one positive label per sequence"));
            (seed, aucs)
        })
        .collect();

    let mut records = Vec::with_capacity(jobs.len() * Method::ALL.len());
    for (&(setting, _), &(seed, aucs)) in jobs.iter().zip(&scored) {
        for (method, value) in Method::ALL.iter().zip(aucs) {
            records.push(RunRecord {
                p_star: settings[setting],
                seed,
                method: *method,
                auc: value,
            });
        }
    }

    let mut summaries = Vec::with_capacity(settings.len() * Method::ALL.len());
    for &p_star in settings {
        for method in Method::ALL {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.method == method && r.p_star == p_star)
                .map(|r| r.auc)
                .collect();
            debug_assert_eq!(values.len(), repeats);
            summaries.push(MethodSummary {
                p_star,
                method,
                stats: boxplot_stats(&values),
            });
        }
    }

    ExperimentResult {
        experiment,
        records,
        summaries,
    }
}

//! Release gate for the whole detection stack. Each test checks one
//! numbered criterion and prints a `criterion N: PASS/FAIL` line, so a
//! single run of this target gives a complete scorecard:
//!
//! 1-4  median AUC of the proposed detector on the four benchmark
//!      families, per anomaly-strength setting;
//! 5    the proposed detector never trails a baseline median on the
//!      drifted families;
//! 6    false-positive behaviour on clean sequences;
//! 7-8  tail and autoregression estimators against known ground truth;
//! 9-10 graph metrics and the ranking metric against exhaustive
//!      reference implementations;
//! 11   drift schedules hit their documented midpoint values.
//!
//! The benchmark runs (criteria 1-5) share one cached result set: 60
//! repeats per setting from a fixed base seed, every method scored on the
//! same sequences. Ten repeats match the published protocol but leave the
//! median comparisons at the mercy of the draw (the baselines' AUC spread
//! on the harder families covers most of [0, 1]); sixty pins the medians
//! down while staying well inside the suite's time budget.

mod support;

use std::sync::OnceLock;

use dygad_core::generators::{erdos_renyi, make_baseline_sequence, star_graph};
use dygad_core::{
    auc, detect, run_experiment, DetectConfig, ExperimentId, ExperimentResult, GraphSnapshot,
    Method, SequenceSpec,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

const REPEATS: usize = 60;
const BASE_SEED: u64 = 424_242;

fn check(criterion: u32, ok: bool, detail: &str) {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!("criterion {criterion}: {verdict} - {detail}");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

static RESULTS: [OnceLock<ExperimentResult>; 4] = [const { OnceLock::new() }; 4];

fn experiment_result(id: ExperimentId) -> &'static ExperimentResult {
    RESULTS[(id.index() - 1) as usize].get_or_init(|| run_experiment(id, REPEATS, BASE_SEED))
}

fn median_auc(result: &ExperimentResult, p_star: f64, method: Method) -> f64 {
    result
        .summaries
        .iter()
        .find(|s| s.method == method && (s.p_star - p_star).abs() < 1e-12)
        .expect("summary for every setting and method")
        .stats
        .median
}

fn medians_line(result: &ExperimentResult, settings: &[f64]) -> String {
    settings
        .iter()
        .map(|&p| format!("{p:.2}:{:.3}", median_auc(result, p, Method::Proposed)))
        .collect::<Vec<_>>()
        .join(" ")
}

#[test]
fn static_er_benchmark_medians() {
    let result = experiment_result(ExperimentId::StaticEr);
    let ok = median_auc(result, 0.10, Method::Proposed) >= 0.90
        && [0.15, 0.20, 0.25]
            .iter()
            .all(|&p| median_auc(result, p, Method::Proposed) >= 0.95);
    let detail = format!(
        "static ER proposed medians {} (need >= 0.90 at 0.10, >= 0.95 above)",
        medians_line(result, &[0.10, 0.15, 0.20, 0.25])
    );
    check(1, ok, &detail);
}

#[test]
fn drifting_er_benchmark_medians() {
    let result = experiment_result(ExperimentId::DriftingEr);
    let ok = median_auc(result, 0.05, Method::Proposed) >= 0.90
        && [0.10, 0.15, 0.20]
            .iter()
            .all(|&p| median_auc(result, p, Method::Proposed) >= 0.95);
    let detail = format!(
        "drifting ER proposed medians {} (need >= 0.90 at 0.05, >= 0.95 above)",
        medians_line(result, &[0.05, 0.10, 0.15, 0.20])
    );
    check(2, ok, &detail);
}

#[test]
fn drifting_pa_benchmark_medians() {
    let result = experiment_result(ExperimentId::DriftingPa);
    let settings = ExperimentId::DriftingPa.allowed_p_star();
    let ok = settings
        .iter()
        .all(|&p| median_auc(result, p, Method::Proposed) >= 0.80);
    let detail = format!(
        "drifting PA proposed medians {} (need >= 0.80 everywhere)",
        medians_line(result, settings)
    );
    check(3, ok, &detail);
}

#[test]
fn drifting_sw_benchmark_medians() {
    let result = experiment_result(ExperimentId::DriftingSw);
    let ok_levels = [0.10, 0.15, 0.20]
        .iter()
        .all(|&p| median_auc(result, p, Method::Proposed) >= 0.75);
    let proposed_at_005 = median_auc(result, 0.05, Method::Proposed);
    let best_baseline_at_005 = [Method::Lad, Method::LadDiff, Method::TensorSplat]
        .iter()
        .map(|&m| median_auc(result, 0.05, m))
        .fold(f64::NEG_INFINITY, f64::max);
    let ok = ok_levels && proposed_at_005 > best_baseline_at_005;
    let detail = format!(
        "drifting SW proposed medians {} (need >= 0.75 from 0.10 up; at 0.05 \
         proposed {proposed_at_005:.3} must beat best baseline {best_baseline_at_005:.3})",
        medians_line(result, &[0.05, 0.10, 0.15, 0.20])
    );
    check(4, ok, &detail);
}

#[test]
fn proposed_never_trails_baselines() {
    let mut worst_margin = f64::INFINITY;
    let mut ok = true;
    for id in [
        ExperimentId::DriftingEr,
        ExperimentId::DriftingPa,
        ExperimentId::DriftingSw,
    ] {
        let result = experiment_result(id);
        for &p in id.allowed_p_star() {
            let proposed = median_auc(result, p, Method::Proposed);
            for m in [Method::Lad, Method::LadDiff, Method::TensorSplat] {
                let margin = proposed - median_auc(result, p, m);
                worst_margin = worst_margin.min(margin);
                ok &= margin >= 0.0;
            }
        }
    }
    let detail = format!(
        "proposed median >= every baseline median across 12 drifted settings \
         (worst margin {worst_margin:+.3})"
    );
    check(5, ok, &detail);
}

#[test]
fn clean_sequences_rarely_flag() {
    let config = DetectConfig::default();
    let mut flag_counts = Vec::with_capacity(100);
    for rep in 0..100u64 {
        let seed = dygad_core::experiments::derive_seed(BASE_SEED, &[6, rep]);
        let spec = SequenceSpec::new(ExperimentId::StaticEr, 0.10, seed);
        let sequence = make_baseline_sequence(&spec).expect("valid spec");
        let detection = detect(&sequence.graphs, &config).expect("long enough");
        flag_counts.push(detection.flagged.iter().filter(|&&f| f).count());
    }
    let mean = flag_counts.iter().sum::<usize>() as f64 / flag_counts.len() as f64;
    let zero_share =
        flag_counts.iter().filter(|&&c| c == 0).count() as f64 / flag_counts.len() as f64;
    let ok = mean <= 1.0 && zero_share >= 0.5;
    let detail = format!(
        "100 clean static-ER sequences: mean flags {mean:.2} (need <= 1.0), \
         {:.0}% flag nothing (need >= 50%)",
        zero_share * 100.0
    );
    check(6, ok, &detail);
}

#[test]
fn tail_estimator_recovers_exponential() {
    let mut rng = ChaCha12Rng::seed_from_u64(77);
    let exp = rand_distr::Exp::new(1.0).unwrap();
    let excesses: Vec<f64> = (0..10_000).map(|_| rng.sample(exp)).collect();

    let (sigma, xi, _) = dygad_core::evt::fit_gpd_excesses(&excesses);
    let fitted_ll = dygad_core::evt::gpd_log_likelihood(&excesses, sigma, xi);

    // A 50 x 50 lattice around the optimum; the even point count keeps the
    // optimum itself off the lattice.
    let mut lattice_ok = true;
    let mut best_lattice = f64::NEG_INFINITY;
    for i in 0..50 {
        for j in 0..50 {
            let s = sigma * (0.5 + i as f64 / 49.0);
            let x = xi - 0.3 + 0.6 * j as f64 / 49.0;
            let ll = dygad_core::evt::gpd_log_likelihood(&excesses, s, x);
            best_lattice = best_lattice.max(ll);
            lattice_ok &= fitted_ll + 1e-9 >= ll;
        }
    }
    let ok = (0.9..=1.1).contains(&sigma) && xi.abs() <= 0.1 && lattice_ok;
    let detail = format!(
        "10k unit-exponential excesses: sigma {sigma:.4} (need [0.9, 1.1]), \
         xi {xi:+.4} (need |xi| <= 0.1), fitted loglik {fitted_ll:.2} beats \
         lattice best {best_lattice:.2}"
    );
    check(7, ok, &detail);
}

fn simulate_ar1(phi: f64, t_len: usize, rng: &mut ChaCha12Rng) -> Vec<f64> {
    let normal = rand_distr::StandardNormal;
    let mut x = 0.0f64;
    for _ in 0..100 {
        let e: f64 = rng.sample(normal);
        x = phi * x + e;
    }
    (0..t_len)
        .map(|_| {
            let e: f64 = rng.sample(normal);
            x = phi * x + e;
            x
        })
        .collect()
}

fn reference_std(values: &[f64]) -> f64 {
    let m = values.iter().sum::<f64>() / values.len() as f64;
    let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
    (ss / (values.len() - 1) as f64).sqrt()
}

/// Differencing depth recomputed from its variance rule, then the best
/// (p, q) from scoring all sixteen candidates and taking the smallest AICc,
/// ties going to fewer parameters and then fewer AR terms.
fn best_order_by_enumeration(series: &[f64]) -> dygad_core::ArimaOrder {
    let mut current = series.to_vec();
    let mut d = 2;
    for depth in 0..2 {
        let next: Vec<f64> = current.windows(2).map(|w| w[1] - w[0]).collect();
        if reference_std(&next) >= 0.95 * reference_std(&current) {
            d = depth;
            break;
        }
        current = next;
    }

    let mut candidates = Vec::new();
    for p in 0..=3 {
        for q in 0..=3 {
            let order = dygad_core::ArimaOrder::new(p, d, q);
            if let Ok(model) = dygad_core::arima::fit_arima(series, order) {
                if !model.fallback && model.aicc.is_finite() {
                    candidates.push((model.aicc, p + q, p, q));
                }
            }
        }
    }
    let best = candidates
        .into_iter()
        .min_by(|a, b| a.partial_cmp(b).unwrap())
        .expect("at least one candidate fits");
    dygad_core::ArimaOrder::new(best.2, d, best.3)
}

#[test]
fn ar_estimator_recovery_and_order_search() {
    let mut recovered = 0;
    let mut search_matches = true;
    for rep in 0..100u64 {
        let mut rng = ChaCha12Rng::seed_from_u64(8_000 + rep);
        let series = simulate_ar1(0.8, 500, &mut rng);

        let order = dygad_core::ArimaOrder::new(1, 0, 0);
        let model = dygad_core::arima::fit_arima(&series, order).expect("AR(1) fits");
        if (0.65..=0.95).contains(&model.ar[0]) {
            recovered += 1;
        }

        let selected = dygad_core::arima::select_order(&series);
        search_matches &= selected == best_order_by_enumeration(&series);
    }
    let ok = recovered >= 90 && search_matches;
    let detail = format!(
        "AR(1) phi=0.8, T=500: phi recovered in {recovered}/100 runs \
         (need >= 90), order search matches enumeration on all 100: {search_matches}"
    );
    check(8, ok, &detail);
}

fn cross_check_graph(g: &GraphSnapshot) -> Result<(), String> {
    let (tri_ref, tri_total_ref) = support::triangles_by_triples(g);
    if g.triangle_counts() != tri_ref || g.triangle_total() != tri_total_ref {
        return Err("triangle counts differ".into());
    }

    let bc = g.betweenness_centrality();
    let bc_ref = support::betweenness_by_path_listing(g);
    for (a, b) in bc.iter().zip(&bc_ref) {
        if (a - b).abs() > 1e-9 {
            return Err(format!("betweenness {a} vs {b}"));
        }
    }

    if g.core_numbers() != support::coreness_by_peeling(g) {
        return Err("core numbers differ".into());
    }
    let kappa = g.vertex_connectivity();
    let kappa_ref = support::connectivity_by_subset_cuts(g);
    if kappa != kappa_ref {
        return Err(format!("connectivity {kappa} vs {kappa_ref}"));
    }

    let t = g.transitivity();
    let t_ref = support::transitivity_by_triples(g);
    if (t - t_ref).abs() > 1e-9 {
        return Err(format!("transitivity {t} vs {t_ref}"));
    }

    let r = g.assortativity_degree();
    let r_ref = support::assortativity_by_correlation(g);
    if (r - r_ref).abs() > 1e-9 {
        return Err(format!("assortativity {r} vs {r_ref}"));
    }
    Ok(())
}

#[test]
fn graph_metrics_match_exhaustive_references() {
    let path5 = GraphSnapshot::new(5, (0..4).map(|i| (i, i + 1))).unwrap();
    let cycle5 = GraphSnapshot::new(5, (0..5).map(|i| (i, (i + 1) % 5))).unwrap();
    let complete5 =
        GraphSnapshot::new(5, (0..5).flat_map(|i| ((i + 1)..5).map(move |j| (i, j)))).unwrap();
    let empty4 = GraphSnapshot::new(4, Vec::new()).unwrap();
    let named = [star_graph(6), path5, cycle5, complete5, empty4];

    let mut rng = ChaCha12Rng::seed_from_u64(99);
    let randoms: Vec<GraphSnapshot> = (0..100)
        .map(|_| {
            let n = rng.random_range(2..=12);
            let p = rng.random_range(0.05..0.95);
            erdos_renyi(n, p, &mut rng)
        })
        .collect();

    let first_failure = named
        .iter()
        .chain(&randoms)
        .find_map(|g| cross_check_graph(g).err());
    let detail = match &first_failure {
        None => {
            "triangles, betweenness, coreness, connectivity, transitivity and \
             assortativity match exhaustive references on 5 named graphs and \
             100 random graphs (n <= 12)"
                .to_string()
        }
        Some(err) => format!("mismatch against exhaustive reference: {err}"),
    };
    check(9, first_failure.is_none(), &detail);
}

#[test]
fn ranking_metric_matches_pair_counting() {
    let mut rng = ChaCha12Rng::seed_from_u64(1_010);
    let mut worst = 0.0f64;
    for _ in 0..1_000 {
        let n = rng.random_range(5..=60);
        let quantised = rng.random_bool(0.5);
        let scores: Vec<f64> = (0..n)
            .map(|_| {
                if quantised {
                    rng.random_range(0..5) as f64 / 4.0
                } else {
                    rng.random_range(0.0..1.0)
                }
            })
            .collect();
        let labels = loop {
            let candidate: Vec<bool> = (0..n).map(|_| rng.random_bool(0.4)).collect();
            if candidate.iter().any(|&l| l) && candidate.iter().any(|&l| !l) {
                break candidate;
            }
        };

        let fast = auc(&scores, &labels).unwrap();
        let mut wins = 0.0f64;
        let mut pairs = 0usize;
        for i in 0..n {
            if !labels[i] {
                continue;
            }
            for j in 0..n {
                if labels[j] {
                    continue;
                }
                pairs += 1;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
        let slow = wins / pairs as f64;
        worst = worst.max((fast - slow).abs());
    }
    let detail = format!(
        "rank-statistic AUC vs pair counting on 1000 fixtures: \
         worst abs diff {worst:.2e} (need <= 1e-12)"
    );
    check(10, worst <= 1e-12, &detail);
}

#[test]
fn drift_schedules_hit_midpoint_values() {
    let er = ExperimentId::DriftingEr.base_parameter(50, 100);
    let pa = ExperimentId::DriftingPa.base_parameter(50, 100);
    let sw = ExperimentId::DriftingSw.base_parameter(50, 100);
    let ok = (er - 0.2727).abs() < 5e-5 && (pa - 1.496).abs() < 5e-4 && (sw - 0.1737).abs() < 5e-5;
    let detail = format!(
        "midpoint parameters ER {er:.4} (0.2727), PA {pa:.3} (1.496), SW {sw:.4} (0.1737)"
    );
    check(11, ok, &detail);
}

//! Fixed-width feature summaries of graph snapshots.
//!
//! Every snapshot is reduced to the same 20 real-valued features so that a
//! sequence of graphs becomes an ordinary multivariate time series. Heavy-tail
//! quantities (degree, triangles, centralities, component sizes) enter through
//! their 99th percentile rather than their maximum, which keeps single-vertex
//! noise out of the summary while still tracking the extremes.
//!
//! Percentiles use linear interpolation on the sorted sample: for `m` values
//! and percentile `q`, the 1-indexed rank is `h = 1 + (m - 1) * q / 100` and
//! the result interpolates between the values at `floor(h)` and `ceil(h)`.
//! Every percentile in this crate (features, trimming bounds, box plots,
//! tail thresholds) goes through [`percentile`] so the convention cannot
//! drift between modules.

use rayon::prelude::*;
use serde::Serialize;

use crate::graph::GraphSnapshot;

/// Number of features per snapshot.
pub const NUM_FEATURES: usize = 20;

/// Column names, in the exact order of [`FeatureVector::to_array`].
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = [
    "num_vertices",
    "num_edges",
    "triangles_p99",
    "degree_p99",
    "edge_density",
    "transitivity",
    "assortativity",
    "mean_distance",
    "diameter",
    "isolated_pct",
    "vertex_connectivity",
    "global_efficiency",
    "num_components",
    "component_size_p99",
    "closeness_ge_08_pct",
    "betweenness_p99",
    "pagerank_p99",
    "hub_eigenvalue",
    "authority_eigenvalue",
    "coreness_p99",
];

/// Interpolated percentile of a sample; `q` is in percent.
///
/// An empty sample returns 0. The input does not need to be sorted.
pub fn percentile(values: &[f64], q: f64) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    percentile_of_sorted(&sorted, q)
}

/// Same as [`percentile`] but assumes `sorted` is already in ascending order.
pub fn percentile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let m = sorted.len();
    let q = q.clamp(0.0, 100.0);
    let h = 1.0 + (m - 1) as f64 * q / 100.0;
    let lo = (h.floor() as usize).clamp(1, m);
    let hi = (h.ceil() as usize).clamp(1, m);
    let frac = h - h.floor();
    sorted[lo - 1] + frac * (sorted[hi - 1] - sorted[lo - 1])
}

/// The 20 features of one snapshot. Field order matches [`FEATURE_NAMES`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FeatureVector {
    pub num_vertices: f64,
    pub num_edges: f64,
    pub triangles_p99: f64,
    pub degree_p99: f64,
    pub edge_density: f64,
    pub transitivity: f64,
    pub assortativity: f64,
    pub mean_distance: f64,
    pub diameter: f64,
    pub isolated_pct: f64,
    pub vertex_connectivity: f64,
    pub global_efficiency: f64,
    pub num_components: f64,
    pub component_size_p99: f64,
    pub closeness_ge_08_pct: f64,
    pub betweenness_p99: f64,
    pub pagerank_p99: f64,
    pub hub_eigenvalue: f64,
    pub authority_eigenvalue: f64,
    pub coreness_p99: f64,
}

impl FeatureVector {
    /// The features as an array in [`FEATURE_NAMES`] order.
    pub fn to_array(&self) -> [f64; NUM_FEATURES] {
        [
            self.num_vertices,
            self.num_edges,
            self.triangles_p99,
            self.degree_p99,
            self.edge_density,
            self.transitivity,
            self.assortativity,
            self.mean_distance,
            self.diameter,
            self.isolated_pct,
            self.vertex_connectivity,
            self.global_efficiency,
            self.num_components,
            self.component_size_p99,
            self.closeness_ge_08_pct,
            self.betweenness_p99,
            self.pagerank_p99,
            self.hub_eigenvalue,
            self.authority_eigenvalue,
            self.coreness_p99,
        ]
    }
}

/// Computes all 20 features of a snapshot.
pub fn extract_features(g: &GraphSnapshot) -> FeatureVector {
    let n = g.num_vertices();
    let m = g.num_edges();
    let degrees: Vec<f64> = g.degrees().iter().map(|&d| d as f64).collect();
    let triangles: Vec<f64> = g.triangle_counts().iter().map(|&t| t as f64).collect();
    let closeness = g.closeness_centrality();
    let betweenness = g.betweenness_centrality();
    let pagerank = g.pagerank();
    let coreness: Vec<f64> = g.core_numbers().iter().map(|&c| c as f64).collect();
    let (component_count, component_sizes, isolated_pct) = g.components_summary();
    let sizes: Vec<f64> = component_sizes.iter().map(|&s| s as f64).collect();
    let (mean_distance, diameter, global_efficiency) = g.path_metrics();
    let gram_eigenvalue = g.principal_eigenvalue_gram();

    let edge_density = if n >= 2 {
        m as f64 / (n * (n - 1) / 2) as f64
    } else {
        0.0
    };
    let closeness_ge_08_pct = if n == 0 {
        0.0
    } else {
        100.0 * closeness.iter().filter(|&&c| c >= 0.8).count() as f64 / n as f64
    };

    FeatureVector {
        num_vertices: n as f64,
        num_edges: m as f64,
        triangles_p99: percentile(&triangles, 99.0),
        degree_p99: percentile(&degrees, 99.0),
        edge_density,
        transitivity: g.transitivity(),
        assortativity: g.assortativity_degree(),
        mean_distance,
        diameter,
        isolated_pct,
        vertex_connectivity: g.vertex_connectivity() as f64,
        global_efficiency,
        num_components: component_count as f64,
        component_size_p99: percentile(&sizes, 99.0),
        closeness_ge_08_pct,
        betweenness_p99: percentile(&betweenness, 99.0),
        pagerank_p99: percentile(&pagerank, 99.0),
        hub_eigenvalue: gram_eigenvalue,
        // Hub and authority coincide on undirected graphs; both columns are
        // kept so the feature layout does not depend on directedness.
        authority_eigenvalue: gram_eigenvalue,
        coreness_p99: percentile(&coreness, 99.0),
    }
}

/// Feature vectors for a whole sequence; row `t` describes snapshot `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: Vec<FeatureVector>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: Vec<FeatureVector>) -> Self {
        Self { rows }
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// One feature across time, by [`FEATURE_NAMES`] column index.
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r.to_array()[j]).collect()
    }

    /// All columns as a `NUM_FEATURES`-element vector of time series.
    pub fn columns(&self) -> Vec<Vec<f64>> {
        (0..NUM_FEATURES).map(|j| self.column(j)).collect()
    }
}

/// Extracts features for every snapshot of a sequence, in order.
///
/// Snapshots are processed in parallel; the result order is the input order.
pub fn extract_sequence(seq: &[GraphSnapshot]) -> FeatureMatrix {
    let rows: Vec<FeatureVector> = seq.par_iter().map(extract_features).collect();
    FeatureMatrix::from_rows(rows)
}

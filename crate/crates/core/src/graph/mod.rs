//! Undirected graph snapshots and the structural metrics computed on them.
//!
//! A [`GraphSnapshot`] is one observation of a network at a point in time:
//! a vertex count `n` and a list of undirected edges over vertices `0..n`.
//! Self-loops are rejected and duplicate edges are collapsed on construction,
//! so every algorithm in this module can assume a simple graph.
//!
//! Distance-based quantities treat the graph as unweighted and use breadth
//! first search. Conventions for degenerate inputs are chosen so that every
//! metric is a finite number: averages over an empty set of pairs are 0,
//! correlations of constant sequences are 0, and an empty graph scores 0 on
//! every spectral quantity.

mod centrality;
mod connectivity;

use thiserror::Error;

pub use centrality::VertexMetric;

/// Errors raised when constructing a snapshot from raw edge data.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    /// An edge endpoint is outside `0..n`.
    #[error("edge ({u}, {v}) references a vertex outside 0..{n}")]
    VertexOutOfRange { u: u32, v: u32, n: usize },
    /// Both endpoints of an edge are the same vertex.
    #[error("self-loop on vertex {vertex} is not allowed")]
    SelfLoop { vertex: u32 },
}

/// An undirected simple graph with a fixed vertex set `0..n`.
///
/// Edges are stored with the smaller endpoint first, sorted and deduplicated,
/// so two snapshots constructed from the same edge set in any order compare
/// equal and serialise identically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSnapshot {
    n: usize,
    edges: Vec<(u32, u32)>,
}

impl GraphSnapshot {
    /// Builds a snapshot over vertices `0..n` from an edge list.
    ///
    /// Duplicate edges (in either orientation) are collapsed. Self-loops and
    /// endpoints outside the vertex range are errors.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self, GraphError> {
        let mut canonical: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop { vertex: u });
            }
            if (u as usize) >= n || (v as usize) >= n {
                return Err(GraphError::VertexOutOfRange { u, v, n });
            }
            canonical.push((u.min(v), u.max(v)));
        }
        canonical.sort_unstable();
        canonical.dedup();
        Ok(Self { n, edges: canonical })
    }

    /// Number of vertices.
    pub fn num_vertices(&self) -> usize {
        self.n
    }

    /// Number of distinct undirected edges.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// The canonical edge list: smaller endpoint first, sorted, no duplicates.
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Sorted adjacency lists for all vertices.
    pub fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u as usize].push(v);
            adj[v as usize].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        adj
    }

    /// Degree of every vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for &(u, v) in &self.edges {
            deg[u as usize] += 1;
            deg[v as usize] += 1;
        }
        deg
    }

    /// Number of triangles each vertex participates in.
    ///
    /// Every triangle {u, v, w} contributes 1 to each of its three corners.
    pub fn triangle_counts(&self) -> Vec<usize> {
        let adj = self.adjacency();
        let mut counts = vec![0usize; self.n];
        // Each triangle is discovered once per edge, i.e. three times in
        // total, and each discovery increments all three corners.
        for &(u, v) in &self.edges {
            for &w in sorted_intersection(&adj[u as usize], &adj[v as usize]) {
                counts[u as usize] += 1;
                counts[v as usize] += 1;
                counts[w as usize] += 1;
            }
        }
        for c in &mut counts {
            *c /= 3;
        }
        counts
    }

    /// Total number of triangles in the graph.
    pub fn triangle_total(&self) -> usize {
        self.triangle_counts().iter().sum::<usize>() / 3
    }

    /// Global clustering coefficient: `3 * triangles / wedges`, where a wedge
    /// is an unordered pair of edges sharing an endpoint. 0 when the graph has
    /// no wedges.
    pub fn transitivity(&self) -> f64 {
        let wedges: usize = self
            .degrees()
            .iter()
            .map(|&d| d * d.saturating_sub(1) / 2)
            .sum();
        if wedges == 0 {
            return 0.0;
        }
        3.0 * self.triangle_total() as f64 / wedges as f64
    }

    /// Pearson correlation of endpoint degrees across edges, with each edge
    /// contributing both orientations. Returns 0 when either marginal is
    /// (numerically) constant, which covers regular graphs and edgeless
    /// graphs.
    pub fn assortativity_degree(&self) -> f64 {
        if self.edges.is_empty() {
            return 0.0;
        }
        let deg = self.degrees();
        let m2 = (2 * self.edges.len()) as f64;
        let mut sum_x = 0.0;
        let mut sum_xx = 0.0;
        let mut sum_xy = 0.0;
        for &(u, v) in &self.edges {
            let du = deg[u as usize] as f64;
            let dv = deg[v as usize] as f64;
            sum_x += du + dv;
            sum_xx += du * du + dv * dv;
            sum_xy += 2.0 * du * dv;
        }
        // Both orientations are included, so the x and y marginals coincide.
        let mean = sum_x / m2;
        let var = sum_xx / m2 - mean * mean;
        if var < 1e-12 {
            return 0.0;
        }
        let cov = sum_xy / m2 - mean * mean;
        cov / var
    }

    /// Connected components: `(count, sizes, isolated_pct)`.
    ///
    /// Sizes are listed in order of each component's smallest vertex id.
    /// `isolated_pct` is the percentage of vertices with degree 0. An empty
    /// vertex set gives `(0, [], 0.0)`.
    pub fn components_summary(&self) -> (usize, Vec<usize>, f64) {
        if self.n == 0 {
            return (0, Vec::new(), 0.0);
        }
        let adj = self.adjacency();
        let mut seen = vec![false; self.n];
        let mut sizes = Vec::new();
        let mut queue = Vec::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            seen[start] = true;
            queue.clear();
            queue.push(start as u32);
            let mut size = 0usize;
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head] as usize;
                head += 1;
                size += 1;
                for &w in &adj[v] {
                    if !seen[w as usize] {
                        seen[w as usize] = true;
                        queue.push(w);
                    }
                }
            }
            sizes.push(size);
        }
        let isolated = adj.iter().filter(|list| list.is_empty()).count();
        let isolated_pct = 100.0 * isolated as f64 / self.n as f64;
        (sizes.len(), sizes, isolated_pct)
    }

    /// Distance summary: `(mean_distance, diameter, global_efficiency)`.
    ///
    /// The mean is taken over reachable ordered pairs, the diameter is the
    /// largest finite distance, and efficiency averages `1/d` over all ordered
    /// pairs with `1/inf = 0` for unreachable ones. A graph with no edges
    /// returns `(0, 0, 0)`.
    pub fn path_metrics(&self) -> (f64, f64, f64) {
        if self.edges.is_empty() || self.n < 2 {
            return (0.0, 0.0, 0.0);
        }
        let adj = self.adjacency();
        let mut dist_sum = 0u64;
        let mut reachable_pairs = 0u64;
        let mut diameter = 0u64;
        let mut inv_sum = 0.0f64;
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = Vec::with_capacity(self.n);
        for s in 0..self.n {
            dist.fill(u32::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push(s as u32);
            let mut head = 0;
            while head < queue.len() {
                let v = queue[head] as usize;
                head += 1;
                let d = dist[v];
                for &w in &adj[v] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = d + 1;
                        queue.push(w);
                    }
                }
            }
            for (v, &found) in dist.iter().enumerate() {
                if v == s || found == u32::MAX {
                    continue;
                }
                let d = found as u64;
                dist_sum += d;
                reachable_pairs += 1;
                diameter = diameter.max(d);
                inv_sum += 1.0 / d as f64;
            }
        }
        let all_pairs = (self.n * (self.n - 1)) as f64;
        let mean = if reachable_pairs == 0 {
            0.0
        } else {
            dist_sum as f64 / reachable_pairs as f64
        };
        (mean, diameter as f64, inv_sum / all_pairs)
    }
}

/// Iterates over the intersection of two sorted slices.
fn sorted_intersection<'a>(a: &'a [u32], b: &'a [u32]) -> impl Iterator<Item = &'a u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(&a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.into_iter()
}

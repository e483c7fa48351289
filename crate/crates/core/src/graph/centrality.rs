//! Per-vertex centrality and importance scores.
//!
//! Closeness is normalised within each connected component:
//!
//! ```text
//! closeness(v) = (|C_v| - 1) / sum_{u in C_v} d(v, u)
//! ```
//!
//! where `C_v` is the component containing `v`; isolated vertices score 0.
//! Betweenness uses Brandes' dependency accumulation on unweighted graphs,
//! with each unordered endpoint pair counted once and no further
//! normalisation. PageRank follows the classic damped random walk with
//! uniform teleport and the mass of degree-0 vertices redistributed uniformly
//! every step. Coreness is the k-core number obtained by iterative peeling.

use super::GraphSnapshot;

/// Selects which per-vertex metric [`GraphSnapshot::per_vertex_metrics`]
/// computes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VertexMetric {
    Degree,
    Triangles,
    Closeness,
    Betweenness,
    Pagerank,
    Coreness,
}

const PAGERANK_DAMPING: f64 = 0.85;
const PAGERANK_TOL: f64 = 1e-8;
const PAGERANK_MAX_ITER: usize = 200;

const EIGEN_TOL: f64 = 1e-10;
const EIGEN_MAX_ITER: usize = 1000;

impl GraphSnapshot {
    /// Computes one of the per-vertex metrics as a dense `f64` vector of
    /// length `n`. Integer-valued metrics (degree, triangles, coreness) are
    /// widened so callers can feed any metric into the same percentile
    /// machinery.
    pub fn per_vertex_metrics(&self, metric: VertexMetric) -> Vec<f64> {
        match metric {
            VertexMetric::Degree => self.degrees().iter().map(|&d| d as f64).collect(),
            VertexMetric::Triangles => self.triangle_counts().iter().map(|&t| t as f64).collect(),
            VertexMetric::Closeness => self.closeness_centrality(),
            VertexMetric::Betweenness => self.betweenness_centrality(),
            VertexMetric::Pagerank => self.pagerank(),
            VertexMetric::Coreness => self.core_numbers().iter().map(|&c| c as f64).collect(),
        }
    }

    /// Component-normalised closeness centrality for every vertex.
    pub fn closeness_centrality(&self) -> Vec<f64> {
        let adj = self.adjacency();
        let mut out = vec![0.0; self.n];
        let mut dist = vec![u32::MAX; self.n];
        let mut queue = Vec::with_capacity(self.n);
        for s in 0..self.n {
            dist.fill(u32::MAX);
            dist[s] = 0;
            queue.clear();
            queue.push(s as u32);
            let mut head = 0;
            let mut sum = 0u64;
            let mut reached = 0u64;
            while head < queue.len() {
                let v = queue[head] as usize;
                head += 1;
                sum += dist[v] as u64;
                reached += 1;
                for &w in &adj[v] {
                    if dist[w as usize] == u32::MAX {
                        dist[w as usize] = dist[v] + 1;
                        queue.push(w);
                    }
                }
            }
            if reached > 1 {
                out[s] = (reached - 1) as f64 / sum as f64;
            }
        }
        out
    }

    /// Shortest-path betweenness centrality, each unordered pair counted once.
    pub fn betweenness_centrality(&self) -> Vec<f64> {
        let adj = self.adjacency();
        let n = self.n;
        let mut bc = vec![0.0f64; n];
        let mut sigma = vec![0.0f64; n];
        let mut dist = vec![i64::MAX; n];
        let mut delta = vec![0.0f64; n];
        let mut preds: Vec<Vec<u32>> = vec![Vec::new(); n];
        let mut order = Vec::with_capacity(n);
        for s in 0..n {
            sigma.fill(0.0);
            dist.fill(i64::MAX);
            delta.fill(0.0);
            for p in &mut preds {
                p.clear();
            }
            order.clear();
            sigma[s] = 1.0;
            dist[s] = 0;
            order.push(s as u32);
            let mut head = 0;
            while head < order.len() {
                let v = order[head] as usize;
                head += 1;
                for &w in &adj[v] {
                    let w = w as usize;
                    if dist[w] == i64::MAX {
                        dist[w] = dist[v] + 1;
                        order.push(w as u32);
                    }
                    if dist[w] == dist[v] + 1 {
                        sigma[w] += sigma[v];
                        preds[w].push(v as u32);
                    }
                }
            }
            // Accumulate dependencies in reverse BFS order.
            for &w in order.iter().rev() {
                let w = w as usize;
                for &v in &preds[w] {
                    let v = v as usize;
                    delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w]);
                }
                if w != s {
                    bc[w] += delta[w];
                }
            }
        }
        // Every unordered pair was visited from both endpoints.
        for value in &mut bc {
            *value /= 2.0;
        }
        bc
    }

    /// PageRank with damping 0.85 and uniform teleport. The returned vector
    /// sums to 1 for any non-empty vertex set.
    pub fn pagerank(&self) -> Vec<f64> {
        let n = self.n;
        if n == 0 {
            return Vec::new();
        }
        let adj = self.adjacency();
        let deg = self.degrees();
        let uniform = 1.0 / n as f64;
        let mut rank = vec![uniform; n];
        let mut next = vec![0.0f64; n];
        for _ in 0..PAGERANK_MAX_ITER {
            let dangling: f64 = (0..n).filter(|&v| deg[v] == 0).map(|v| rank[v]).sum();
            let base = (1.0 - PAGERANK_DAMPING) * uniform + PAGERANK_DAMPING * dangling * uniform;
            next.fill(base);
            for v in 0..n {
                if deg[v] > 0 {
                    let share = PAGERANK_DAMPING * rank[v] / deg[v] as f64;
                    for &w in &adj[v] {
                        next[w as usize] += share;
                    }
                }
            }
            let l1: f64 = rank.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum();
            std::mem::swap(&mut rank, &mut next);
            if l1 < PAGERANK_TOL {
                break;
            }
        }
        rank
    }

    /// Coreness (k-core number) of every vertex via min-degree peeling.
    pub fn core_numbers(&self) -> Vec<usize> {
        let n = self.n;
        let adj = self.adjacency();
        let mut deg = self.degrees();
        let mut core = vec![0usize; n];
        let mut removed = vec![false; n];
        // Bucket queue over current degrees; the running peel level only ever
        // increases, which is exactly the k-core number of the vertex removed.
        let max_deg = deg.iter().copied().max().unwrap_or(0);
        let mut buckets: Vec<Vec<u32>> = vec![Vec::new(); max_deg + 1];
        for v in 0..n {
            buckets[deg[v]].push(v as u32);
        }
        let mut level = 0usize;
        let mut processed = 0usize;
        let mut cursor = 0usize;
        while processed < n {
            while cursor <= max_deg && buckets[cursor].is_empty() {
                cursor += 1;
            }
            let v = match buckets[cursor].pop() {
                Some(v) => v as usize,
                None => break,
            };
            if removed[v] || deg[v] != cursor {
                // Stale bucket entry: the vertex moved down since insertion.
                continue;
            }
            level = level.max(deg[v]);
            core[v] = level;
            removed[v] = true;
            processed += 1;
            for &w in &adj[v] {
                let w = w as usize;
                if !removed[w] && deg[w] > 0 {
                    deg[w] -= 1;
                    buckets[deg[w]].push(w as u32);
                    if deg[w] < cursor {
                        cursor = deg[w];
                    }
                }
            }
        }
        core
    }

    /// Largest eigenvalue of `A * A^T` (the Gram matrix of the adjacency
    /// matrix), computed by power iteration. For an undirected graph this is
    /// the squared spectral radius of `A`, and it serves as both the hub and
    /// authority strength of the snapshot.
    pub fn principal_eigenvalue_gram(&self) -> f64 {
        let n = self.n;
        if n == 0 || self.edges.is_empty() {
            return 0.0;
        }
        let adj = self.adjacency();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        let mut tmp = vec![0.0f64; n];
        let mut w = vec![0.0f64; n];
        let mut lambda_prev = 0.0f64;
        for _ in 0..EIGEN_MAX_ITER {
            multiply_adjacency(&adj, &v, &mut tmp);
            multiply_adjacency(&adj, &tmp, &mut w);
            let lambda: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
            let norm: f64 = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            for (vi, wi) in v.iter_mut().zip(&w) {
                *vi = wi / norm;
            }
            if (lambda - lambda_prev).abs() <= EIGEN_TOL * lambda.abs().max(1.0) {
                return lambda;
            }
            lambda_prev = lambda;
        }
        lambda_prev
    }
}

fn multiply_adjacency(adj: &[Vec<u32>], x: &[f64], out: &mut [f64]) {
    for (v, slot) in out.iter_mut().enumerate() {
        *slot = adj[v].iter().map(|&w| x[w as usize]).sum();
    }
}

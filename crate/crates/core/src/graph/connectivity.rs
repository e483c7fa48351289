//! Global vertex connectivity via unit-capacity maximum flow.
//!
//! Every vertex `v` is split into `v_in -> v_out` with capacity 1 and every
//! undirected edge `{u, v}` becomes the uncapacitated arcs `u_out -> v_in` and
//! `v_out -> u_in`. The maximum `s_out -> t_in` flow then equals the smallest
//! set of vertices (excluding `s` and `t`) whose removal disconnects `t` from
//! `s`. The global value minimises over a fixed source `s`: all pairs `(s, t)`
//! with `t` not adjacent to `s`, plus all non-adjacent pairs of neighbours of
//! `s`, which together are guaranteed to probe some minimum cut.
//!
//! Two shortcuts keep this affordable on dense snapshots: the source is a
//! minimum-degree vertex (its neighbourhood is itself a cut, giving an upper
//! bound before any flow runs), and each flow computation stops as soon as it
//! reaches the best bound seen so far, since it can no longer improve it.

use super::GraphSnapshot;

impl GraphSnapshot {
    /// Size of the smallest vertex cut, with the conventions: a complete
    /// graph on `n` vertices has connectivity `n - 1`, and a disconnected or
    /// single-vertex graph has connectivity 0.
    pub fn vertex_connectivity(&self) -> usize {
        let n = self.n;
        if n <= 1 {
            return 0;
        }
        if self.num_edges() == n * (n - 1) / 2 {
            return n - 1;
        }
        let (components, _, _) = self.components_summary();
        if components > 1 {
            return 0;
        }
        let adj = self.adjacency();
        let deg = self.degrees();
        let s = (0..n).min_by_key(|&v| deg[v]).unwrap();
        // The graph is connected but not complete, so removing N(s) isolates
        // s from some non-neighbour: deg(s) is a valid upper bound.
        let mut best = deg[s];
        let mut flow = SplitFlow::new(self);
        let is_edge = |a: usize, b: usize| adj[a].binary_search(&(b as u32)).is_ok();
        for t in 0..n {
            if t != s && !is_edge(s, t) {
                best = best.min(flow.max_flow(s, t, best));
                if best == 0 {
                    return 0;
                }
            }
        }
        let neighbours = &adj[s];
        for i in 0..neighbours.len() {
            for j in (i + 1)..neighbours.len() {
                let (x, y) = (neighbours[i] as usize, neighbours[j] as usize);
                if !is_edge(x, y) {
                    best = best.min(flow.max_flow(x, y, best));
                }
            }
        }
        best
    }
}

const INF: u32 = u32::MAX;

/// Unit-capacity flow network over the vertex-split digraph, rebuilt once per
/// graph and reset between terminal pairs.
struct SplitFlow {
    // Forward-star arc storage with paired reverse arcs (arc ^ 1).
    head: Vec<u32>,
    cap: Vec<u32>,
    first: Vec<Vec<u32>>,
    parent_arc: Vec<u32>,
    visited_token: Vec<u32>,
    token: u32,
    queue: Vec<u32>,
    base_cap: Vec<u32>,
}

impl SplitFlow {
    fn new(g: &GraphSnapshot) -> Self {
        let n = g.num_vertices();
        let node_count = 2 * n;
        let mut head = Vec::new();
        let mut cap = Vec::new();
        let mut first: Vec<Vec<u32>> = vec![Vec::new(); node_count];
        let mut push_arc = |first: &mut Vec<Vec<u32>>, from: usize, to: usize, c: u32| {
            let id = head.len() as u32;
            head.push(to as u32);
            cap.push(c);
            first[from].push(id);
            head.push(from as u32);
            cap.push(0);
            first[to].push(id + 1);
        };
        for v in 0..n {
            push_arc(&mut first, 2 * v, 2 * v + 1, 1);
        }
        for &(u, v) in g.edges() {
            let (u, v) = (u as usize, v as usize);
            push_arc(&mut first, 2 * u + 1, 2 * v, INF);
            push_arc(&mut first, 2 * v + 1, 2 * u, INF);
        }
        let base_cap = cap.clone();
        Self {
            head,
            cap,
            first,
            parent_arc: vec![0; node_count],
            visited_token: vec![0; node_count],
            token: 0,
            queue: Vec::with_capacity(node_count),
            base_cap,
        }
    }

    /// Maximum flow from `s_out` to `t_in`, stopping early once `limit` is
    /// reached because the caller only cares about values below it.
    fn max_flow(&mut self, s: usize, t: usize, limit: usize) -> usize {
        self.cap.copy_from_slice(&self.base_cap);
        let source = (2 * s + 1) as u32;
        let sink = (2 * t) as u32;
        let mut flow = 0usize;
        while flow < limit && self.augment(source, sink) {
            flow += 1;
        }
        flow
    }

    /// One breadth-first augmenting path; all bottlenecks are 1.
    fn augment(&mut self, source: u32, sink: u32) -> bool {
        self.token += 1;
        self.queue.clear();
        self.queue.push(source);
        self.visited_token[source as usize] = self.token;
        let mut head_idx = 0;
        let mut found = false;
        'bfs: while head_idx < self.queue.len() {
            let v = self.queue[head_idx];
            head_idx += 1;
            for &arc in &self.first[v as usize] {
                if self.cap[arc as usize] == 0 {
                    continue;
                }
                let to = self.head[arc as usize];
                if self.visited_token[to as usize] == self.token {
                    continue;
                }
                self.visited_token[to as usize] = self.token;
                self.parent_arc[to as usize] = arc;
                if to == sink {
                    found = true;
                    break 'bfs;
                }
                self.queue.push(to);
            }
        }
        if !found {
            return false;
        }
        let mut v = sink;
        while v != source {
            let arc = self.parent_arc[v as usize] as usize;
            if self.cap[arc] != INF {
                self.cap[arc] -= 1;
            }
            if self.cap[arc ^ 1] != INF {
                self.cap[arc ^ 1] += 1;
            }
            v = self.head[arc ^ 1];
        }
        true
    }
}

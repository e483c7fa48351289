//! Exhaustive reference implementations of the graph metrics, for
//! cross-checking on small inputs. Everything here favours bluntness over
//! speed: triangles come from triple enumeration, betweenness from listing
//! every shortest path, connectivity from trying every vertex subset as a
//! cut. None of it shares code with the library versions.

use dygad_core::GraphSnapshot;

fn adjacency_matrix(g: &GraphSnapshot) -> Vec<Vec<bool>> {
    let n = g.num_vertices();
    let mut m = vec![vec![false; n]; n];
    for &(u, v) in g.edges() {
        m[u as usize][v as usize] = true;
        m[v as usize][u as usize] = true;
    }
    m
}

fn bfs_distances(adj: &[Vec<u32>], source: usize) -> Vec<usize> {
    let mut dist = vec![usize::MAX; adj.len()];
    dist[source] = 0;
    let mut queue = std::collections::VecDeque::from([source]);
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            let v = v as usize;
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

/// Per-vertex and total triangle counts from scanning all vertex triples.
pub fn triangles_by_triples(g: &GraphSnapshot) -> (Vec<usize>, usize) {
    let n = g.num_vertices();
    let m = adjacency_matrix(g);
    let mut per_vertex = vec![0usize; n];
    let mut total = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                if m[i][j] && m[j][k] && m[i][k] {
                    per_vertex[i] += 1;
                    per_vertex[j] += 1;
                    per_vertex[k] += 1;
                    total += 1;
                }
            }
        }
    }
    (per_vertex, total)
}

fn list_shortest_paths(
    adj: &[Vec<u32>],
    dist_s: &[usize],
    dist_t: &[usize],
    total_len: usize,
    target: usize,
    stack: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    let u = *stack.last().unwrap();
    if u == target {
        out.push(stack.clone());
        return;
    }
    for &v in &adj[u] {
        let v = v as usize;
        if dist_s[v] == dist_s[u] + 1 && dist_s[v].saturating_add(dist_t[v]) == total_len {
            stack.push(v);
            list_shortest_paths(adj, dist_s, dist_t, total_len, target, stack, out);
            stack.pop();
        }
    }
}

/// Betweenness by literally listing every shortest path of every unordered
/// pair and crediting each interior vertex with `1 / number_of_paths`.
pub fn betweenness_by_path_listing(g: &GraphSnapshot) -> Vec<f64> {
    let n = g.num_vertices();
    let adj = g.adjacency();
    let mut score = vec![0.0f64; n];
    for s in 0..n {
        let dist_s = bfs_distances(&adj, s);
        for t in (s + 1)..n {
            if dist_s[t] == usize::MAX {
                continue;
            }
            let dist_t = bfs_distances(&adj, t);
            let mut paths = Vec::new();
            let mut stack = vec![s];
            list_shortest_paths(&adj, &dist_s, &dist_t, dist_s[t], t, &mut stack, &mut paths);
            let credit = 1.0 / paths.len() as f64;
            for path in &paths {
                for &v in &path[1..path.len() - 1] {
                    score[v] += credit;
                }
            }
        }
    }
    score
}

/// Core numbers by recomputing the k-core from scratch for every k: repeat
/// "delete any vertex with fewer than k surviving neighbours" to a fixed
/// point, and record the largest k each vertex survives.
pub fn coreness_by_peeling(g: &GraphSnapshot) -> Vec<usize> {
    let n = g.num_vertices();
    let adj = g.adjacency();
    let mut core = vec![0usize; n];
    for k in 1..=n {
        let mut alive = vec![true; n];
        loop {
            let mut removed = false;
            for v in 0..n {
                if alive[v] {
                    let deg = adj[v].iter().filter(|&&w| alive[w as usize]).count();
                    if deg < k {
                        alive[v] = false;
                        removed = true;
                    }
                }
            }
            if !removed {
                break;
            }
        }
        for v in 0..n {
            if alive[v] {
                core[v] = k;
            }
        }
    }
    core
}

fn survivors_connected(adj: &[Vec<u32>], removed_mask: u32) -> bool {
    let n = adj.len();
    let survivors: Vec<usize> = (0..n).filter(|&v| removed_mask & (1 << v) == 0).collect();
    if survivors.is_empty() {
        return true;
    }
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::from([survivors[0]]);
    seen[survivors[0]] = true;
    let mut count = 1;
    while let Some(u) = queue.pop_front() {
        for &v in &adj[u] {
            let v = v as usize;
            if removed_mask & (1 << v) == 0 && !seen[v] {
                seen[v] = true;
                count += 1;
                queue.push_back(v);
            }
        }
    }
    count == survivors.len()
}

/// Vertex connectivity by trying every subset of vertices as a candidate
/// cut, smallest subsets first. Same conventions as the library: 0 for
/// disconnected or single-vertex graphs, n - 1 for complete graphs.
pub fn connectivity_by_subset_cuts(g: &GraphSnapshot) -> usize {
    let n = g.num_vertices();
    if n <= 1 {
        return 0;
    }
    let adj = g.adjacency();
    if !survivors_connected(&adj, 0) {
        return 0;
    }
    if g.num_edges() == n * (n - 1) / 2 {
        return n - 1;
    }
    for size in 1..n - 1 {
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != size {
                continue;
            }
            if (n - size) >= 2 && !survivors_connected(&adj, mask) {
                return size;
            }
        }
    }
    n - 1
}

/// Transitivity as closed ordered triples over all ordered triples: walk
/// every (a, b, c) with a-b and b-c edges and a != c, and check a-c.
pub fn transitivity_by_triples(g: &GraphSnapshot) -> f64 {
    let n = g.num_vertices();
    let m = adjacency_matrix(g);
    let mut open_or_closed = 0usize;
    let mut closed = 0usize;
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a != c && m[a][b] && m[b][c] {
                    open_or_closed += 1;
                    if m[a][c] {
                        closed += 1;
                    }
                }
            }
        }
    }
    if open_or_closed == 0 {
        0.0
    } else {
        closed as f64 / open_or_closed as f64
    }
}

/// Degree assortativity as a plain Pearson correlation over the list of
/// (degree(u), degree(v)) pairs, each edge contributing both orientations.
pub fn assortativity_by_correlation(g: &GraphSnapshot) -> f64 {
    let deg = g.degrees();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(u, v) in g.edges() {
        let du = deg[u as usize] as f64;
        let dv = deg[v as usize] as f64;
        xs.push(du);
        ys.push(dv);
        xs.push(dv);
        ys.push(du);
    }
    if xs.is_empty() {
        return 0.0;
    }
    let m = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / m;
    let mean_y = ys.iter().sum::<f64>() / m;
    let var_x = xs.iter().map(|x| (x - mean_x).powi(2)).sum::<f64>() / m;
    let var_y = ys.iter().map(|y| (y - mean_y).powi(2)).sum::<f64>() / m;
    if var_x < 1e-12 || var_y < 1e-12 {
        return 0.0;
    }
    let cov = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean_x) * (y - mean_y))
        .sum::<f64>()
        / m;
    cov / (var_x * var_y).sqrt()
}

//! Exact ATSP for small graphs: metric completion plus a subset DP.

use crate::error::{Error, Result};
use crate::graph::TwoWeightDigraph;

/// Default vertex limit of [`brute_force_atsp`].
pub const DEFAULT_MAX_N: usize = 12;
/// Limit when large instances are explicitly allowed.
pub const EXTENDED_MAX_N: usize = 16;

/// Minimum weight of a closed walk visiting every vertex, which equals the
/// minimum weight of a connected Eulerian multisubset of edges.
pub fn brute_force_atsp(graph: &TwoWeightDigraph) -> Result<f64> {
    brute_force_atsp_with_limit(graph, DEFAULT_MAX_N)
}

pub fn brute_force_atsp_with_limit(graph: &TwoWeightDigraph, max_n: usize) -> Result<f64> {
    let n = graph.vertex_count();
    let max_n = max_n.min(EXTENDED_MAX_N);
    if n > max_n {
        return Err(Error::TooLarge { n, max: max_n });
    }
    let dist = shortest_paths(graph);
    if n == 1 {
        return Ok(0.0);
    }
    if dist.iter().flatten().any(|d| d.is_infinite()) {
        return Err(Error::NotStronglyConnected);
    }
    // dp[mask][v]: cheapest walk from 0 through `mask` (containing 0 and v) ending at v.
    let full = 1usize << n;
    let mut dp = vec![f64::INFINITY; full * n];
    dp[n] = 0.0;
    for mask in 1..full {
        if mask & 1 == 0 {
            continue;
        }
        for v in 0..n {
            let cur = dp[mask * n + v];
            if !cur.is_finite() {
                continue;
            }
            for w in 0..n {
                if mask >> w & 1 == 1 {
                    continue;
                }
                let next = mask | 1 << w;
                let cand = cur + dist[v][w];
                if cand < dp[next * n + w] {
                    dp[next * n + w] = cand;
                }
            }
        }
    }
    let best = (1..n)
        .map(|v| dp[(full - 1) * n + v] + dist[v][0])
        .fold(f64::INFINITY, f64::min);
    Ok(best)
}

/// All-pairs shortest path weights (Floyd–Warshall).
pub fn shortest_paths(graph: &TwoWeightDigraph) -> Vec<Vec<f64>> {
    let n = graph.vertex_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (v, row) in d.iter_mut().enumerate() {
        row[v] = 0.0;
    }
    for (e, edge) in graph.edges().iter().enumerate() {
        let w = graph.weight(e);
        if w < d[edge.tail][edge.head] {
            d[edge.tail][edge.head] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if !dik.is_finite() {
                continue;
            }
            let row_k = d[k].clone();
            for (dij, dkj) in d[i].iter_mut().zip(&row_k) {
                let cand = dik + dkj;
                if cand < *dij {
                    *dij = cand;
                }
            }
        }
    }
    d
}

//! Integral circulations with node in-degree caps and exact auxiliary degrees.

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;

/// Node requirement on the in-degree of an integral circulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeBound {
    AtMost(i64),
    Exactly(i64),
}

impl NodeBound {
    fn range(self) -> (i64, i64) {
        match self {
            NodeBound::AtMost(c) => (0, c),
            NodeBound::Exactly(c) => (c, c),
        }
    }
}

/// Finds an integral circulation on `arcs` (uncapacitated, indexed as given)
/// whose node in-degrees respect `bounds`. Nodes are split into in/out halves
/// and lower bounds are removed with a super source and sink.
pub fn integral_circulation(bounds: &[NodeBound], arcs: &[(usize, usize)]) -> Result<Vec<i64>> {
    let n = bounds.len();
    let total_cap: i64 = bounds.iter().map(|b| b.range().1).sum();
    let big = total_cap + 1;
    // Node v: in-half 2v, out-half 2v+1; super source 2n, super sink 2n+1.
    let s = 2 * n;
    let t = 2 * n + 1;
    let mut net = FlowNetwork::<i64>::new(2 * n + 2);
    let mut excess = vec![0i64; 2 * n];
    let mut node_arcs = Vec::with_capacity(n);
    for (v, b) in bounds.iter().enumerate() {
        let (lo, hi) = b.range();
        if lo > hi || lo < 0 {
            return Err(Error::inconsistency(format!(
                "node {v} has empty degree range"
            )));
        }
        node_arcs.push(net.add_arc(2 * v, 2 * v + 1, hi - lo));
        excess[2 * v + 1] += lo;
        excess[2 * v] -= lo;
    }
    let mut arc_ids = Vec::with_capacity(arcs.len());
    for &(u, v) in arcs {
        arc_ids.push(net.add_arc(2 * u + 1, 2 * v, big));
    }
    let mut demand = 0;
    for (node, &ex) in excess.iter().enumerate() {
        if ex > 0 {
            net.add_arc(s, node, ex);
            demand += ex;
        } else if ex < 0 {
            net.add_arc(node, t, -ex);
        }
    }
    let value = net.max_flow(s, t);
    if value != demand {
        return Err(Error::inconsistency(format!(
            "integral circulation infeasible: routed {value} of {demand} units of lower bounds"
        )));
    }
    Ok(arc_ids.into_iter().map(|a| net.flow(a)).collect())
}

/// Independent check of an integral circulation against its bounds.
pub fn verify_integral(bounds: &[NodeBound], arcs: &[(usize, usize)], y: &[i64]) -> Result<()> {
    let n = bounds.len();
    let mut indeg = vec![0i64; n];
    let mut outdeg = vec![0i64; n];
    for (&(u, v), &val) in arcs.iter().zip(y) {
        if val < 0 {
            return Err(Error::inconsistency(
                "negative value in integral circulation",
            ));
        }
        outdeg[u] += val;
        indeg[v] += val;
    }
    for v in 0..n {
        if indeg[v] != outdeg[v] {
            return Err(Error::inconsistency(format!(
                "integral circulation unbalanced at node {v}: in {} out {}",
                indeg[v], outdeg[v]
            )));
        }
        let (lo, hi) = bounds[v].range();
        if indeg[v] < lo || indeg[v] > hi {
            return Err(Error::inconsistency(format!(
                "node {v} in-degree {} outside [{lo}, {hi}]",
                indeg[v]
            )));
        }
    }
    Ok(())
}

//! Routing the expensive mass of `x*` to a small terminal set.
//!
//! The network copies every edge of `G` with capacity `x*_e` and moves the
//! tail of each expensive edge to a new source `s`. A minimal terminal set
//! `T` absorbing the whole source capacity is found greedily, and the sink
//! flow `f` is read off a path decomposition truncated at the first terminal.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{TwoWeightDigraph, VertexId};
use crate::held_karp::FractionalCirculation;
use crate::tol;

/// Tolerance for "the flow value is preserved" during terminal removal.
pub const REMOVAL_TOL: f64 = 1e-7;
/// Terminal count bound factor: `|T| ≤ 8·c(δ⁺(s))`.
pub const TERMINAL_FACTOR: f64 = 8.0;

pub const SOURCE: usize = usize::MAX;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NetArc {
    /// `SOURCE` for redirected expensive edges.
    pub tail: usize,
    pub head: VertexId,
    pub cap: f64,
}

/// Arc `e` is the image of edge `e`, so the back-mapping is the identity.
#[derive(Debug, Clone)]
pub struct SourcedCapacityNetwork {
    pub n: usize,
    pub arcs: Vec<NetArc>,
}

impl SourcedCapacityNetwork {
    pub fn source_capacity(&self) -> f64 {
        self.arcs
            .iter()
            .filter(|a| a.tail == SOURCE)
            .map(|a| a.cap)
            .sum()
    }

    /// `(c(δ⁻(S)), c(δ⁺(S)))` for `S ⊆ V`, the source never being a member.
    pub fn cut_values(&self, members: &[bool]) -> (f64, f64) {
        let mut inc = 0.0;
        let mut out = 0.0;
        for a in &self.arcs {
            let tail_in = a.tail != SOURCE && members[a.tail];
            let head_in = members[a.head];
            if head_in && !tail_in {
                inc += a.cap;
            }
            if tail_in && !head_in {
                out += a.cap;
            }
        }
        (inc, out)
    }

    /// Whether `c(δ⁻(S)) ≥ max{1, c(δ⁺(S))}` holds within `slack`.
    pub fn satisfies_cut_condition(&self, members: &[bool], slack: f64) -> bool {
        let (inc, out) = self.cut_values(members);
        inc >= 1.0 - slack && inc >= out - slack
    }
}

pub fn build_sourced_network(
    graph: &TwoWeightDigraph,
    x: &FractionalCirculation,
) -> Result<SourcedCapacityNetwork> {
    let mass = x.expensive_mass(graph);
    if mass < 1.0 - tol::feas() {
        return Err(Error::ExpensiveMassBelowOne { mass });
    }
    let arcs = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(e, edge)| NetArc {
            tail: if graph.is_expensive(e) {
                SOURCE
            } else {
                edge.tail
            },
            head: edge.head,
            cap: x.values[e],
        })
        .collect();
    Ok(SourcedCapacityNetwork {
        n: graph.vertex_count(),
        arcs,
    })
}

#[derive(Debug, Clone)]
pub struct MaxFlow {
    pub value: f64,
    /// Flow per network arc (same indexing as `arcs`).
    pub arc_flow: Vec<f64>,
}

/// Maximum flow from `s` into `sinks` through a super-sink.
pub fn max_flow(network: &SourcedCapacityNetwork, sinks: &[VertexId]) -> MaxFlow {
    let n = network.n;
    let s = n;
    let t = n + 1;
    let mut net = FlowNetwork::<f64>::new(n + 2);
    for a in &network.arcs {
        let tail = if a.tail == SOURCE { s } else { a.tail };
        net.add_arc(tail, a.head, a.cap);
    }
    let big = network.source_capacity() + 1.0;
    for &v in sinks {
        net.add_arc(v, t, big);
    }
    let value = net.max_flow(s, t);
    let arc_flow = (0..network.arcs.len())
        .map(|i| net.flow(i).max(0.0))
        .collect();
    MaxFlow { value, arc_flow }
}

/// Greedy removal from `T = V` in ascending vertex order.
pub fn find_minimal_terminal_set(network: &SourcedCapacityNetwork) -> Result<Vec<VertexId>> {
    let order: Vec<VertexId> = (0..network.n).collect();
    find_minimal_terminal_set_in_order(network, &order)
}

/// Greedy removal trying vertices in `order`; every vertex must appear once.
pub fn find_minimal_terminal_set_in_order(
    network: &SourcedCapacityNetwork,
    order: &[VertexId],
) -> Result<Vec<VertexId>> {
    let target = network.source_capacity();
    let mut keep = vec![true; network.n];
    let members =
        |keep: &[bool]| -> Vec<VertexId> { (0..keep.len()).filter(|&v| keep[v]).collect() };
    let full = max_flow(network, &members(&keep)).value;
    if full < target - REMOVAL_TOL {
        return Err(Error::inconsistency(format!(
            "max flow into V is {full}, below source capacity {target}"
        )));
    }
    for &v in order {
        keep[v] = false;
        let value = max_flow(network, &members(&keep)).value;
        if value < target - REMOVAL_TOL {
            keep[v] = true;
        }
    }
    let terminals = members(&keep);
    if terminals.len() as f64 > TERMINAL_FACTOR * target + tol::feas() {
        return Err(Error::inconsistency(format!(
            "|T| = {} exceeds {} * c(δ⁺(s)) = {}",
            terminals.len(),
            TERMINAL_FACTOR,
            TERMINAL_FACTOR * target
        )));
    }
    Ok(terminals)
}

/// The flow `f` on `G` and its terminal set.
#[derive(Debug, Clone, Serialize)]
pub struct SinkFlow {
    pub f: Vec<f64>,
    pub terminals: Vec<VertexId>,
    /// `f(δ⁻(t))`, aligned with `terminals`.
    pub inflow: Vec<f64>,
}

impl SinkFlow {
    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.terminals.binary_search(&v).is_ok()
    }

    pub fn inflow_of(&self, v: VertexId) -> Option<f64> {
        self.terminals
            .binary_search(&v)
            .ok()
            .map(|i| self.inflow[i])
    }

    pub fn terminal_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &t in &self.terminals {
            mask[t] = true;
        }
        mask
    }

    /// Checks every defining property of a sink flow against `x*`.
    pub fn check(&self, graph: &TwoWeightDigraph, x: &FractionalCirculation) -> Result<()> {
        let fail = |msg: String| Err(Error::SinkFlowViolation(msg));
        if self.f.len() != graph.edge_count() {
            return fail("flow vector length differs from edge count".into());
        }
        if !self.terminals.windows(2).all(|w| w[0] < w[1]) {
            return fail("terminal list not strictly increasing".into());
        }
        for (e, (&fe, &xe)) in self.f.iter().zip(&x.values).enumerate() {
            if fe < 0.0 || fe > xe + tol::ZERO {
                return fail(format!("f({e}) = {fe} outside [0, x*_e = {xe}]"));
            }
            if graph.is_expensive(e) && (fe - xe).abs() > tol::ZERO {
                return fail(format!(
                    "expensive edge {e} not saturated: f = {fe}, x* = {xe}"
                ));
            }
        }
        let mask = self.terminal_mask(graph.vertex_count());
        let inflow = graph.in_degrees(&self.f);
        let mut total = 0.0;
        for (i, &t) in self.terminals.iter().enumerate() {
            if (inflow[t] - self.inflow[i]).abs() > tol::feas() {
                return fail(format!("stored inflow of terminal {t} is stale"));
            }
            if inflow[t] <= 0.0 {
                return fail(format!("terminal {t} receives no flow"));
            }
            let cheap_out: f64 = graph
                .out_edges(t)
                .iter()
                .filter(|&&e| !graph.is_expensive(e))
                .map(|&e| self.f[e])
                .sum();
            if cheap_out > tol::ZERO {
                return fail(format!("terminal {t} has cheap outflow {cheap_out}"));
            }
            total += inflow[t];
        }
        // Non-terminals conserve the cheap part of f; expensive edges start at s.
        for v in 0..graph.vertex_count() {
            if mask[v] {
                continue;
            }
            let cheap_out: f64 = graph
                .out_edges(v)
                .iter()
                .filter(|&&e| !graph.is_expensive(e))
                .map(|&e| self.f[e])
                .sum();
            if (inflow[v] - cheap_out).abs() > tol::DECOMPOSITION {
                return fail(format!(
                    "vertex {v} is not a terminal but f is unbalanced: in {} vs cheap out {cheap_out}",
                    inflow[v]
                ));
            }
        }
        let mass = x.expensive_mass(graph);
        if (total - mass).abs() > tol::feas() {
            return fail(format!(
                "terminal inflow {total} differs from x*(E1) = {mass}"
            ));
        }
        if self.terminals.len() as f64 > TERMINAL_FACTOR * mass + tol::feas() {
            return fail(format!(
                "|T| = {} exceeds 8 x*(E1) = {}",
                self.terminals.len(),
                8.0 * mass
            ));
        }
        Ok(())
    }
}

/// Path-cycle decomposition of a maximum `s → T` flow, truncated at first terminals.
pub fn extract_sink_flow(
    graph: &TwoWeightDigraph,
    network: &SourcedCapacityNetwork,
    terminals: &[VertexId],
) -> Result<SinkFlow> {
    let n = network.n;
    let mut is_terminal = vec![false; n];
    for &t in terminals {
        is_terminal[t] = true;
    }
    let flow = max_flow(network, terminals);
    let mut rest = flow.arc_flow.clone();
    let mut out_arcs: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut source_arcs = Vec::new();
    for (i, a) in network.arcs.iter().enumerate() {
        if a.tail == SOURCE {
            source_arcs.push(i);
        } else {
            out_arcs[a.tail].push(i);
        }
    }
    let best_arc = |arcs: &[usize], rest: &[f64]| -> Option<usize> {
        let mut best: Option<usize> = None;
        for &i in arcs {
            if rest[i] > tol::ZERO && best.is_none_or(|b| rest[i] > rest[b]) {
                best = Some(i);
            }
        }
        best
    };

    let mut f = vec![0.0; network.arcs.len()];
    let mut lost = 0.0;
    let limit = 4 * (network.arcs.len() + 1) * (n + 1);
    let mut rounds = 0;
    while let Some(first) = best_arc(&source_arcs, &rest) {
        rounds += 1;
        if rounds > limit {
            return Err(Error::inconsistency(
                "sink-flow decomposition did not terminate",
            ));
        }
        let mut path = vec![first];
        let mut position = vec![usize::MAX; n];
        let mut v = network.arcs[first].head;
        position[v] = 0;
        loop {
            if is_terminal[v] {
                let amount = path.iter().map(|&i| rest[i]).fold(f64::INFINITY, f64::min);
                for &i in &path {
                    rest[i] -= amount;
                    f[i] += amount;
                }
                break;
            }
            match best_arc(&out_arcs[v], &rest) {
                None => {
                    let amount = path.iter().map(|&i| rest[i]).fold(f64::INFINITY, f64::min);
                    for &i in &path {
                        rest[i] -= amount;
                    }
                    lost += amount;
                    break;
                }
                Some(i) => {
                    let w = network.arcs[i].head;
                    path.push(i);
                    if position[w] != usize::MAX {
                        // Cancel the cycle closing at w and continue from w.
                        let start = position[w] + 1;
                        let amount = path[start..]
                            .iter()
                            .map(|&j| rest[j])
                            .fold(f64::INFINITY, f64::min);
                        for &j in &path[start..] {
                            rest[j] -= amount;
                        }
                        for &j in &path[start..] {
                            position[network.arcs[j].head] = usize::MAX;
                        }
                        path.truncate(start);
                        position[w] = start - 1;
                        v = w;
                    } else {
                        position[w] = path.len() - 1;
                        v = w;
                    }
                }
            }
        }
    }
    if lost > tol::DECOMPOSITION {
        return Err(Error::inconsistency(format!(
            "sink-flow decomposition left residual {lost}"
        )));
    }
    // Source arcs are expensive edges; snap their float noise to x*.
    for &i in &source_arcs {
        let cap = network.arcs[i].cap;
        if (f[i] - cap).abs() > REMOVAL_TOL {
            return Err(Error::inconsistency(format!(
                "expensive edge {i} carries {} of {cap} after decomposition",
                f[i]
            )));
        }
        f[i] = cap;
    }
    for (fi, a) in f.iter_mut().zip(&network.arcs) {
        *fi = tol::clamp_zero(fi.min(a.cap));
    }
    let inflow_all = graph.in_degrees(&f);
    let mut terminals: Vec<VertexId> = terminals.to_vec();
    terminals.sort_unstable();
    let inflow = terminals.iter().map(|&t| inflow_all[t]).collect();
    Ok(SinkFlow {
        f,
        terminals,
        inflow,
    })
}

/// Network, minimal terminals, and sink flow in one call, with invariant checks.
pub fn route(graph: &TwoWeightDigraph, x: &FractionalCirculation) -> Result<SinkFlow> {
    let network = build_sourced_network(graph, x)?;
    let terminals = find_minimal_terminal_set(&network)?;
    let sink = extract_sink_flow(graph, &network, &terminals)?;
    sink.check(graph, x)?;
    Ok(sink)
}

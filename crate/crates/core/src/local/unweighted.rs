//! The cheap-edge reduction for `x*(E₁) < 1` and the unweighted 3-light
//! subroutine.

use crate::error::{Error, Result};
use crate::graph::TwoWeightDigraph;
use crate::held_karp::FractionalCirculation;
use crate::local::aux::{build_aux_graph, cheap_path, pick_sink_component};
use crate::local::integral::{integral_circulation, verify_integral, NodeBound};
use crate::local::reroute::{
    build_rerouted, cycle_decompose, select_incoming, ClassRoute, RefinedArc, RefinedNet,
};
use crate::local::{check_walk, Partition, PatchWalk, RawSolution};
use crate::split::{LowerBound, LBS_SCALE};
use crate::tol;

/// Lightness of the unweighted subroutine w.r.t. `w₀·x(δ⁻(v))`.
pub const UNWEIGHTED_FACTOR: f64 = 3.0;
/// Lightness of the reduction w.r.t. its lower bound.
pub const SIX_LIGHT_FACTOR: f64 = 6.0;

/// `x′ = x*|E₀ + Σ_{e ∈ E₁} x*_e · 1_{P(e)}` with `P(e)` a fewest-edge cheap path.
pub fn replace_expensive(graph: &TwoWeightDigraph, x: &FractionalCirculation) -> Result<Vec<f64>> {
    let mass = x.expensive_mass(graph);
    if mass >= 1.0 - tol::feas() {
        return Err(Error::ExpensiveMassAtLeastOne { mass });
    }
    let mut x_prime: Vec<f64> = (0..graph.edge_count())
        .map(|e| {
            if graph.is_expensive(e) {
                0.0
            } else {
                x.values[e]
            }
        })
        .collect();
    let used: Vec<usize> = graph
        .expensive_edges()
        .filter(|&e| x.values[e] > 0.0)
        .collect();
    if used.is_empty() {
        return Ok(x_prime);
    }
    if !graph.is_strongly_connected_on(|e| !graph.is_expensive(e)) {
        return Err(Error::inconsistency(
            "0 < x*(E1) < 1 but the cheap edges are not strongly connected",
        ));
    }
    let all = vec![true; graph.vertex_count()];
    for e in used {
        let edge = graph.edge(e);
        let path = cheap_path(graph, &all, edge.tail, edge.head).ok_or_else(|| {
            Error::inconsistency("cheap path missing in a strongly connected graph")
        })?;
        for p in path {
            x_prime[p] += x.values[e];
        }
    }
    let weight_prime = graph.weigh(&x_prime);
    if weight_prime > 2.0 * x.objective + tol::OBJ {
        return Err(Error::inconsistency(format!(
            "w(x') = {weight_prime} exceeds 2 w(x*) = {}",
            2.0 * x.objective
        )));
    }
    Ok(x_prime)
}

/// `lb(v) = w₀·x′(δ⁻(v)) / 2`, stored with `lbs = LBS_SCALE·lb`.
pub fn unweighted_lower_bound(graph: &TwoWeightDigraph, x_prime: &[f64]) -> LowerBound {
    let indeg = graph.in_degrees(x_prime);
    let lbs = indeg
        .iter()
        .map(|d| LBS_SCALE * graph.w0() * d / 2.0)
        .collect();
    LowerBound::from_lbs(lbs)
}

/// Reroutes one unit per class through an auxiliary node on the cheap
/// support of `x`, rounds with in-degree caps `⌈x(δ⁻(v))⌉`, and patches each
/// class with a cheap path inside its sink component.
pub(crate) fn three_light(
    graph: &TwoWeightDigraph,
    x: &[f64],
    partition: &Partition,
) -> Result<RawSolution> {
    let n = graph.vertex_count();
    if let Some(e) = (0..graph.edge_count()).find(|&e| graph.is_expensive(e) && x[e] > tol::ZERO) {
        return Err(Error::inconsistency(format!(
            "expensive edge {e} in the support of x"
        )));
    }
    let mut net = RefinedNet {
        node_count: n,
        arcs: graph
            .edges()
            .iter()
            .enumerate()
            .filter(|(e, _)| x[*e] > tol::ZERO)
            .map(|(e, edge)| RefinedArc {
                tail: edge.tail,
                head: edge.head,
                value: x[e],
                base: e,
            })
            .collect(),
    };
    let no_terminals = vec![false; n];
    let mut sinks = Vec::with_capacity(partition.len());
    let mut classes = Vec::with_capacity(partition.len());
    for class in &partition.classes {
        let aux = build_aux_graph(graph, class, &no_terminals);
        let sink = pick_sink_component(&aux);
        let mut members = vec![false; n];
        for &v in &sink {
            members[v] = true;
        }
        let (incoming, side) = select_incoming(&mut net, &members, 1.0, |_| 0)?;
        classes.push(ClassRoute {
            members: members.clone(),
            incoming,
            side,
            exits: Vec::new(),
            inner: Vec::new(),
        });
        sinks.push(members);
    }
    let cycles = cycle_decompose(&net)?;
    let rerouted = build_rerouted(net, classes, &cycles, 1.0)?;

    let indeg = graph.in_degrees(x);
    let mut bounds: Vec<NodeBound> = indeg
        .iter()
        .map(|&d| NodeBound::AtMost(tol::nudged_ceil(d)))
        .collect();
    bounds.extend(std::iter::repeat_n(NodeBound::Exactly(1), partition.len()));
    let arcs: Vec<(usize, usize)> = rerouted
        .pieces
        .iter()
        .map(|p| (rerouted.piece_tail(p), rerouted.piece_head(p)))
        .collect();
    let yy = integral_circulation(&bounds, &arcs)?;
    verify_integral(&bounds, &arcs, &yy)?;

    let mut y = vec![0u64; graph.edge_count()];
    let mut entering = vec![None; partition.len()];
    let mut leaving = vec![None; partition.len()];
    for (p, &val) in rerouted.pieces.iter().zip(&yy) {
        if val <= 0 {
            continue;
        }
        let base = rerouted.net.arcs[p.arc].base;
        y[base] += val as u64;
        if let Some(i) = p.head_class {
            entering[i] = Some(base);
        }
        if let Some(i) = p.tail_class {
            leaving[i] = Some(base);
        }
    }
    let mut walks = Vec::with_capacity(partition.len());
    for i in 0..partition.len() {
        let (Some(ein), Some(eout)) = (entering[i], leaving[i]) else {
            return Err(Error::inconsistency(format!(
                "auxiliary node {i} unused by the integral circulation"
            )));
        };
        let u = graph.edge(ein).head;
        let v = graph.edge(eout).tail;
        let edges = cheap_path(graph, &sinks[i], u, v).ok_or_else(|| {
            Error::inconsistency(format!(
                "class {i}: no cheap path {u} -> {v} inside the sink component"
            ))
        })?;
        let walk = PatchWalk {
            class: i,
            u,
            v,
            edges,
            via_terminal: None,
            bad: false,
        };
        check_walk(graph, &partition.members(i), &walk)?;
        walks.push(walk);
    }
    let raw = RawSolution {
        y,
        walks,
        provenance: None,
    };
    check_three_light(graph, x, &raw)?;
    Ok(raw)
}

/// Every weak component `G̃` of `F` has `w(G̃) ≤ 3·Σ_{v ∈ G̃} w₀·x(δ⁻(v))`.
fn check_three_light(graph: &TwoWeightDigraph, x: &[f64], raw: &RawSolution) -> Result<()> {
    let f = raw.multiset();
    let indeg = graph.in_degrees(x);
    for comp in f.weak_components(graph) {
        let weight: f64 = comp
            .edges
            .iter()
            .map(|&(e, m)| graph.weight(e) * m as f64)
            .sum();
        let bound: f64 = comp.vertices.iter().map(|&v| graph.w0() * indeg[v]).sum();
        if weight > UNWEIGHTED_FACTOR * bound * (1.0 + tol::OBJ) + tol::OBJ {
            return Err(Error::inconsistency(format!(
                "component of vertex {} has weight {weight} above 3 * {bound}",
                comp.vertices[0]
            )));
        }
    }
    Ok(())
}

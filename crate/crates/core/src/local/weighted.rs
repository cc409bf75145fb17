//! The two-weight rerouting on the split graph.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::flow_routing::SinkFlow;
use crate::graph::{TwoWeightDigraph, VertexId};
use crate::held_karp::FractionalCirculation;
use crate::local::aux::{build_aux_graph, pick_sink_component, AuxGraph};
use crate::local::integral::{integral_circulation, verify_integral, NodeBound};
use crate::local::reroute::{
    build_rerouted, cycle_decompose, select_incoming, ClassRoute, RefinedArc, RefinedNet, Rerouted,
};
use crate::local::{check_walk, Partition, PatchWalk, RawSolution, SplitProvenance};
use crate::split::{ArcKind, LowerBound, SplitCirculation, SplitGraph};
use crate::tol;

/// Incoming mass rerouted per class.
pub const HALF: f64 = 0.5;
/// Per-walk weight bound in units of `lbs`.
pub const WALK_FACTOR: f64 = 4.0;
/// Per-walk in-degree bound.
pub const WALK_INDEGREE: usize = 4;

/// Per-class data kept for patching.
pub struct ClassData {
    pub aux: AuxGraph,
    pub sink: Vec<VertexId>,
    pub sink_mask: Vec<bool>,
}

pub fn split_net(split: &SplitGraph, xsp: &SplitCirculation) -> RefinedNet {
    let arcs = split
        .arcs
        .iter()
        .zip(&xsp.values)
        .enumerate()
        .filter(|(_, (_, &v))| v > tol::ZERO)
        .map(|(i, (a, &v))| RefinedArc {
            tail: a.tail.0,
            head: a.head.0,
            value: v,
            base: i,
        })
        .collect();
    RefinedNet {
        node_count: split.node_count(),
        arcs,
    }
}

/// Lifts a vertex mask to split nodes.
pub fn split_mask(mask: &[bool]) -> Vec<bool> {
    mask.iter().flat_map(|&m| [m, m]).collect()
}

/// Aux graphs, sink components and the cheap-edge sink property per class.
pub fn class_data(
    graph: &TwoWeightDigraph,
    sink_flow: &SinkFlow,
    partition: &Partition,
) -> Result<Vec<ClassData>> {
    let n = graph.vertex_count();
    let terminals = sink_flow.terminal_mask(n);
    let mut out = Vec::with_capacity(partition.len());
    for (i, class) in partition.classes.iter().enumerate() {
        let aux = build_aux_graph(graph, class, &terminals);
        let sink = pick_sink_component(&aux);
        let mut sink_mask = vec![false; n];
        for &v in &sink {
            sink_mask[v] = true;
        }
        let class_mask = partition.members(i);
        for (e, edge) in graph.edges().iter().enumerate() {
            if sink_mask[edge.tail]
                && class_mask[edge.head]
                && !sink_mask[edge.head]
                && !graph.is_expensive(e)
            {
                return Err(Error::inconsistency(format!(
                    "cheap edge {e} leaves the sink component of class {i} inside the class"
                )));
            }
        }
        out.push(ClassData {
            aux,
            sink,
            sink_mask,
        });
    }
    Ok(out)
}

/// Selected arcs, cycle decomposition and rerouted vector for all classes.
pub fn reroute(split: &SplitGraph, xsp: &SplitCirculation, data: &[ClassData]) -> Result<Rerouted> {
    let mut net = split_net(split, xsp);
    let mut classes = Vec::with_capacity(data.len());
    for d in data {
        let members = split_mask(&d.sink_mask);
        let (incoming, side) = select_incoming(&mut net, &members, HALF, |a| {
            u8::from(split.arcs[a.base].is_debt())
        })?;
        classes.push(ClassRoute {
            members,
            incoming,
            side,
            exits: Vec::new(),
            inner: Vec::new(),
        });
    }
    let cycles = cycle_decompose(&net)?;
    build_rerouted(net, classes, &cycles, HALF)
}

/// The smallest terminal `t` with a free-cheap path `t⁰ → v⁰` inside the
/// sink component, together with that path as split arcs.
pub fn backtrack_terminal(
    split: &SplitGraph,
    xsp: &SplitCirculation,
    sink_mask: &[bool],
    v: VertexId,
) -> Option<(VertexId, Vec<usize>)> {
    let n = split.n;
    let mut into: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (i, a) in split.arcs.iter().enumerate() {
        if a.kind == ArcKind::FreeCheap
            && xsp.values[i] > tol::ZERO
            && sink_mask[a.tail.vertex()]
            && sink_mask[a.head.vertex()]
        {
            into[a.head.vertex()].push(i);
        }
    }
    let mut via = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut queue = VecDeque::from([v]);
    while let Some(w) = queue.pop_front() {
        for &a in &into[w] {
            let u = split.arcs[a].tail.vertex();
            if !seen[u] {
                seen[u] = true;
                via[u] = a;
                queue.push_back(u);
            }
        }
    }
    let t = split.terminals.iter().copied().find(|&t| seen[t])?;
    let mut path = Vec::new();
    let mut cur = t;
    while cur != v {
        let a = via[cur];
        path.push(a);
        cur = split.arcs[a].head.vertex();
    }
    Some((t, path))
}

pub(crate) fn run(
    graph: &TwoWeightDigraph,
    x: &FractionalCirculation,
    sink_flow: &SinkFlow,
    split: &SplitGraph,
    xsp: &SplitCirculation,
    lower: &LowerBound,
    partition: &Partition,
) -> Result<RawSolution> {
    let n = graph.vertex_count();
    let data = class_data(graph, sink_flow, partition)?;
    let rerouted = reroute(split, xsp, &data)?;

    // Every exit of a debt class that is not a debt-cheap arc must be
    // reachable by free-cheap arcs from a terminal.
    for (i, c) in rerouted.classes.iter().enumerate() {
        if c.side != 1 {
            continue;
        }
        for &(a, _) in &c.exits {
            let base = &split.arcs[rerouted.net.arcs[a].base];
            if base.kind == ArcKind::DebtCheap {
                continue;
            }
            if backtrack_terminal(split, xsp, &data[i].sink_mask, base.tail.vertex()).is_none() {
                return Err(Error::inconsistency(format!(
                    "exit arc of class {i} has no free-cheap path from a terminal"
                )));
            }
        }
    }

    let indeg = split.in_degrees(&xsp.values);
    let mut bounds: Vec<NodeBound> = indeg
        .iter()
        .map(|&d| NodeBound::AtMost(tol::nudged_ceil(2.0 * d)))
        .collect();
    bounds.extend(std::iter::repeat_n(NodeBound::Exactly(1), partition.len()));
    let arcs: Vec<(usize, usize)> = rerouted
        .pieces
        .iter()
        .map(|p| (rerouted.piece_tail(p), rerouted.piece_head(p)))
        .collect();
    let yy = integral_circulation(&bounds, &arcs)?;
    verify_integral(&bounds, &arcs, &yy)?;

    let mut y_sp = vec![0u64; split.arcs.len()];
    let mut entering = vec![None; partition.len()];
    let mut leaving = vec![None; partition.len()];
    for (p, &val) in rerouted.pieces.iter().zip(&yy) {
        if val <= 0 {
            continue;
        }
        y_sp[rerouted.net.arcs[p.arc].base] += val as u64;
        if let Some(i) = p.head_class {
            entering[i] = Some(p.arc);
        }
        if let Some(i) = p.tail_class {
            leaving[i] = Some(p.arc);
        }
    }

    let mut walks = Vec::with_capacity(partition.len());
    for (i, d) in data.iter().enumerate() {
        let (Some(ein), Some(eout)) = (entering[i], leaving[i]) else {
            return Err(Error::inconsistency(format!(
                "auxiliary node {i} unused by the integral circulation"
            )));
        };
        let ein_base = &split.arcs[rerouted.net.arcs[ein].base];
        let eout_base = &split.arcs[rerouted.net.arcs[eout].base];
        let u = ein_base.head.vertex();
        let v = eout_base.tail.vertex();
        // Expensive exits leave a free node, so they count with the free arcs.
        let leaves_free = !eout_base.tail.is_debt();
        let bad = ein_base.is_debt() && leaves_free;
        let debt_class = rerouted.classes[i].side == 1;
        let (edges, via_terminal) = if debt_class && leaves_free {
            let (t, path) = backtrack_terminal(split, xsp, &d.sink_mask, v).ok_or_else(|| {
                Error::inconsistency(format!(
                    "class {i}: no terminal reaches {v} by free-cheap arcs"
                ))
            })?;
            let aux_path = d.aux.shortest_path(u, t).ok_or_else(|| {
                Error::inconsistency(format!("class {i}: no auxiliary path {u} -> {t}"))
            })?;
            let mut edges = d.aux.expand(&aux_path);
            edges.extend(
                path.iter()
                    .map(|&a| split.arcs[a].edge().expect("cheap arc has an edge")),
            );
            (edges, Some(t))
        } else {
            let aux_path = d.aux.shortest_path(u, v).ok_or_else(|| {
                Error::inconsistency(format!("class {i}: no auxiliary path {u} -> {v}"))
            })?;
            (d.aux.expand(&aux_path), None)
        };
        let walk = PatchWalk {
            class: i,
            u,
            v,
            edges,
            via_terminal,
            bad,
        };
        check_walk(graph, &partition.members(i), &walk)?;
        check_walk_bounds(graph, lower, sink_flow, &walk)?;
        walks.push(walk);
    }

    let mut y = vec![0u64; graph.edge_count()];
    for (a, &val) in split.arcs.iter().zip(&y_sp) {
        if let Some(e) = a.edge() {
            y[e] += val;
        }
    }
    let x_in = graph.in_degrees(&x.values);
    let mut y_in = vec![0u64; n];
    for (e, &val) in y.iter().enumerate() {
        y_in[graph.edge(e).head] += val;
    }
    for v in 0..n {
        if y_in[v] as f64 > 2.0 * x_in[v] + 3.0 + tol::feas() {
            return Err(Error::inconsistency(format!(
                "y(δ⁻({v})) = {} exceeds 2 x*(δ⁻(v)) + 3 = {}",
                y_in[v],
                2.0 * x_in[v] + 3.0
            )));
        }
    }
    Ok(RawSolution {
        y,
        walks,
        provenance: Some(SplitProvenance { y_sp }),
    })
}

/// Weight, in-degree and expensive-edge bounds of one patch walk.
pub fn check_walk_bounds(
    graph: &TwoWeightDigraph,
    lower: &LowerBound,
    sink_flow: &SinkFlow,
    walk: &PatchWalk,
) -> Result<()> {
    let report = walk_report(graph, lower, sink_flow, walk);
    if report.weight > WALK_FACTOR * report.lbs * (1.0 + tol::OBJ) + tol::OBJ {
        return Err(Error::inconsistency(format!(
            "patch walk of class {} has weight {} above {WALK_FACTOR} * lbs = {}",
            walk.class,
            report.weight,
            WALK_FACTOR * report.lbs
        )));
    }
    if report.max_indegree > WALK_INDEGREE {
        return Err(Error::inconsistency(format!(
            "patch walk of class {} enters a vertex {} times",
            walk.class, report.max_indegree
        )));
    }
    if report.expensive > 2 * report.terminals {
        return Err(Error::inconsistency(format!(
            "patch walk of class {} uses {} expensive edges with {} terminals",
            walk.class, report.expensive, report.terminals
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy)]
pub struct WalkReport {
    pub weight: f64,
    pub lbs: f64,
    pub max_indegree: usize,
    pub expensive: usize,
    pub terminals: usize,
}

pub fn walk_report(
    graph: &TwoWeightDigraph,
    lower: &LowerBound,
    sink_flow: &SinkFlow,
    walk: &PatchWalk,
) -> WalkReport {
    let n = graph.vertex_count();
    let mut on = vec![false; n];
    let mut indeg = vec![0usize; n];
    on[walk.u] = true;
    on[walk.v] = true;
    let mut weight = 0.0;
    let mut expensive = 0;
    for &e in &walk.edges {
        let edge = graph.edge(e);
        on[edge.tail] = true;
        on[edge.head] = true;
        indeg[edge.head] += 1;
        weight += graph.weight(e);
        if graph.is_expensive(e) {
            expensive += 1;
        }
    }
    let lbs = (0..n).filter(|&v| on[v]).map(|v| lower.lbs[v]).sum();
    let terminals = (0..n)
        .filter(|&v| on[v] && sink_flow.is_terminal(v))
        .count();
    WalkReport {
        weight,
        lbs,
        max_indegree: indeg.into_iter().max().unwrap_or(0),
        expensive,
        terminals,
    }
}

//! The split graph: a free copy `v⁰` and a debt copy `v¹` of every vertex,
//! with the split circulation `x_sp` and the lower bounds `lbs` and `lb`.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow_routing::SinkFlow;
use crate::graph::{EdgeId, TwoWeightDigraph, VertexId};
use crate::held_karp::FractionalCirculation;
use crate::tol;

/// `lb = lbs / LBS_SCALE`.
pub const LBS_SCALE: f64 = 10.0;
/// Component lightness target with respect to `lb`.
pub const LIGHTNESS_TARGET: f64 = LBS_SCALE * LBS_SCALE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SplitNode(pub usize);

impl SplitNode {
    pub fn free(v: VertexId) -> Self {
        SplitNode(2 * v)
    }

    pub fn debt(v: VertexId) -> Self {
        SplitNode(2 * v + 1)
    }

    pub fn vertex(self) -> VertexId {
        self.0 / 2
    }

    pub fn is_debt(self) -> bool {
        self.0 % 2 == 1
    }
}

impl fmt::Display for SplitNode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.vertex(), self.0 % 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ArcKind {
    FreeCheap,
    DebtCheap,
    Expensive,
    Discharge,
}

impl ArcKind {
    pub fn name(self) -> &'static str {
        match self {
            ArcKind::FreeCheap => "free-cheap",
            ArcKind::DebtCheap => "debt-cheap",
            ArcKind::Expensive => "expensive",
            ArcKind::Discharge => "discharge",
        }
    }

    pub fn is_cheap(self) -> bool {
        matches!(self, ArcKind::FreeCheap | ArcKind::DebtCheap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ArcOrigin {
    Edge(EdgeId),
    Discharge(VertexId),
}

impl fmt::Display for ArcOrigin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcOrigin::Edge(e) => write!(f, "e{e}"),
            ArcOrigin::Discharge(t) => write!(f, "t{t}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SplitArc {
    pub tail: SplitNode,
    pub head: SplitNode,
    pub kind: ArcKind,
    pub origin: ArcOrigin,
}

impl SplitArc {
    /// Debt arcs enter a debt node (debt-cheap and expensive images); the
    /// others are free arcs.
    pub fn is_debt(&self) -> bool {
        self.head.is_debt()
    }

    pub fn edge(&self) -> Option<EdgeId> {
        match self.origin {
            ArcOrigin::Edge(e) => Some(e),
            ArcOrigin::Discharge(_) => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitGraph {
    pub n: usize,
    pub arcs: Vec<SplitArc>,
    pub terminals: Vec<VertexId>,
    pub w0: f64,
    pub w1: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SplitCirculation {
    pub values: Vec<f64>,
}

impl SplitGraph {
    pub fn node_count(&self) -> usize {
        2 * self.n
    }

    pub fn weight(&self, arc: usize) -> f64 {
        match self.arcs[arc].kind {
            ArcKind::FreeCheap | ArcKind::DebtCheap => self.w0,
            ArcKind::Expensive => self.w1,
            ArcKind::Discharge => 0.0,
        }
    }

    /// Whether every arc follows the endpoint pattern of its kind.
    pub fn arc_pattern_ok(&self) -> bool {
        let is_terminal = |v: VertexId| self.terminals.binary_search(&v).is_ok();
        self.arcs.iter().all(|a| match a.kind {
            ArcKind::FreeCheap => !a.tail.is_debt() && !a.head.is_debt(),
            ArcKind::DebtCheap => a.tail.is_debt() && a.head.is_debt(),
            ArcKind::Expensive => !a.tail.is_debt() && a.head.is_debt(),
            ArcKind::Discharge => {
                a.tail.is_debt()
                    && !a.head.is_debt()
                    && a.tail.vertex() == a.head.vertex()
                    && is_terminal(a.tail.vertex())
            }
        })
    }

    /// No arc debt→free except discharges, none free→debt except expensive images.
    pub fn layer_crossings_ok(&self) -> bool {
        self.arcs
            .iter()
            .all(|a| match (a.tail.is_debt(), a.head.is_debt()) {
                (true, false) => a.kind == ArcKind::Discharge,
                (false, true) => a.kind == ArcKind::Expensive,
                _ => true,
            })
    }

    /// `x_sp(δ⁻(v)) − x_sp(δ⁺(v))` for every split node.
    pub fn imbalance(&self, x: &SplitCirculation) -> Vec<f64> {
        let mut net = vec![0.0; self.node_count()];
        for (a, v) in self.arcs.iter().zip(&x.values) {
            net[a.head.0] += v;
            net[a.tail.0] -= v;
        }
        net
    }

    pub fn in_degrees(&self, x: &[f64]) -> Vec<f64> {
        let mut deg = vec![0.0; self.node_count()];
        for (a, v) in self.arcs.iter().zip(x) {
            deg[a.head.0] += v;
        }
        deg
    }

    /// `x_sp` over arcs leaving the image of `S ⊆ V`.
    pub fn image_out_value(&self, members: &[bool], x: &SplitCirculation) -> f64 {
        self.arcs
            .iter()
            .zip(&x.values)
            .filter(|(a, _)| members[a.tail.vertex()] && !members[a.head.vertex()])
            .map(|(_, v)| v)
            .sum()
    }

    /// Contract `(v⁰, v¹)` and drop discharge arcs.
    pub fn contract(&self, x: &[f64], edge_count: usize) -> Vec<f64> {
        let mut out = vec![0.0; edge_count];
        for (a, v) in self.arcs.iter().zip(x) {
            if let ArcOrigin::Edge(e) = a.origin {
                out[e] += v;
            }
        }
        out
    }

    /// Validates that `walk` is a walk and reports whether it uses a discharge arc.
    pub fn debt_path_check(&self, walk: &[usize]) -> Result<bool> {
        if walk.is_empty() {
            return Err(Error::InvalidWalk("empty walk".into()));
        }
        for &a in walk {
            if a >= self.arcs.len() {
                return Err(Error::InvalidWalk(format!("arc {a} does not exist")));
            }
        }
        for pair in walk.windows(2) {
            if self.arcs[pair[0]].head != self.arcs[pair[1]].tail {
                return Err(Error::InvalidWalk(format!(
                    "arc {} does not continue arc {}",
                    pair[1], pair[0]
                )));
            }
        }
        Ok(walk
            .iter()
            .any(|&a| self.arcs[a].kind == ArcKind::Discharge))
    }

    pub fn discharge_arc(&self, t: VertexId) -> Option<usize> {
        self.arcs
            .iter()
            .position(|a| a.origin == ArcOrigin::Discharge(t))
    }
}

pub fn build_split(
    graph: &TwoWeightDigraph,
    x: &FractionalCirculation,
    sink: &SinkFlow,
) -> Result<(SplitGraph, SplitCirculation)> {
    sink.check(graph, x)?;
    let mut arcs = Vec::new();
    let mut values = Vec::new();
    for (e, edge) in graph.edges().iter().enumerate() {
        let (u, v) = (edge.tail, edge.head);
        if graph.is_expensive(e) {
            arcs.push(SplitArc {
                tail: SplitNode::free(u),
                head: SplitNode::debt(v),
                kind: ArcKind::Expensive,
                origin: ArcOrigin::Edge(e),
            });
            values.push(x.values[e]);
            continue;
        }
        let free = tol::clamp_zero(x.values[e] - sink.f[e]);
        if free > 0.0 {
            arcs.push(SplitArc {
                tail: SplitNode::free(u),
                head: SplitNode::free(v),
                kind: ArcKind::FreeCheap,
                origin: ArcOrigin::Edge(e),
            });
            values.push(free);
        }
        let debt = tol::clamp_zero(sink.f[e]);
        if debt > 0.0 {
            arcs.push(SplitArc {
                tail: SplitNode::debt(u),
                head: SplitNode::debt(v),
                kind: ArcKind::DebtCheap,
                origin: ArcOrigin::Edge(e),
            });
            values.push(debt);
        }
    }
    for (&t, &inflow) in sink.terminals.iter().zip(&sink.inflow) {
        arcs.push(SplitArc {
            tail: SplitNode::debt(t),
            head: SplitNode::free(t),
            kind: ArcKind::Discharge,
            origin: ArcOrigin::Discharge(t),
        });
        values.push(inflow);
    }
    let split = SplitGraph {
        n: graph.vertex_count(),
        arcs,
        terminals: sink.terminals.clone(),
        w0: graph.w0(),
        w1: graph.w1(),
    };
    let circulation = SplitCirculation { values };
    let worst = split
        .imbalance(&circulation)
        .into_iter()
        .map(f64::abs)
        .fold(0.0, f64::max);
    if worst > tol::feas() {
        return Err(Error::inconsistency(format!(
            "split circulation unbalanced by {worst}"
        )));
    }
    Ok((split, circulation))
}

#[derive(Debug, Clone, Serialize)]
pub struct LowerBound {
    pub lbs: Vec<f64>,
    pub lb: Vec<f64>,
}

impl LowerBound {
    pub fn from_lbs(lbs: Vec<f64>) -> Self {
        let lb = lbs.iter().map(|v| v / LBS_SCALE).collect();
        Self { lbs, lb }
    }

    pub fn lbs_sum(&self, vertices: impl IntoIterator<Item = VertexId>) -> f64 {
        vertices.into_iter().map(|v| self.lbs[v]).sum()
    }

    pub fn lb_sum(&self, vertices: impl IntoIterator<Item = VertexId>) -> f64 {
        vertices.into_iter().map(|v| self.lb[v]).sum()
    }

    pub fn total_lbs(&self) -> f64 {
        self.lbs.iter().sum()
    }

    pub fn total_lb(&self) -> f64 {
        self.lb.iter().sum()
    }
}

/// `lbs(v) = w₀·x*(δ⁻(v))`, plus `w₁·⌈f(δ⁻(v))⌉` when `v` is a terminal.
pub fn compute_lower_bound(
    graph: &TwoWeightDigraph,
    x: &FractionalCirculation,
    sink: &SinkFlow,
) -> Result<LowerBound> {
    let indeg = graph.in_degrees(&x.values);
    let mut lbs: Vec<f64> = indeg.iter().map(|d| graph.w0() * d).collect();
    for (&t, &inflow) in sink.terminals.iter().zip(&sink.inflow) {
        lbs[t] += graph.w1() * tol::nudged_ceil(inflow) as f64;
    }
    let bound = LowerBound::from_lbs(lbs);
    let total = bound.total_lbs();
    if total > LBS_SCALE * x.objective + tol::OBJ {
        return Err(Error::inconsistency(format!(
            "lbs(V) = {total} exceeds {LBS_SCALE} * OPT = {}",
            LBS_SCALE * x.objective
        )));
    }
    Ok(bound)
}

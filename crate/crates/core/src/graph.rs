//! Directed multigraphs with two edge weights, cuts and component primitives.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightClass {
    Cheap,
    Expensive,
}

impl WeightClass {
    pub fn code(self) -> u8 {
        match self {
            WeightClass::Cheap => 0,
            WeightClass::Expensive => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(WeightClass::Cheap),
            1 => Some(WeightClass::Expensive),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub class: WeightClass,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// A directed multigraph whose edges are either cheap (weight `w0`) or
/// expensive (weight `w1`). Edge ids are dense and follow insertion order.
///
/// Weights live on the graph, not on edges. Strong connectivity is not
/// enforced here because several callers need to reason about graphs that
/// lack it; the LP stage rejects such graphs.
#[derive(Debug, Clone)]
pub struct TwoWeightDigraph {
    n: usize,
    edges: Vec<Edge>,
    w0: f64,
    w1: f64,
    out_adj: Vec<Vec<EdgeId>>,
    in_adj: Vec<Vec<EdgeId>>,
}

impl TwoWeightDigraph {
    pub fn new<I>(n: usize, w0: f64, w1: f64, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (VertexId, VertexId, WeightClass)>,
    {
        if n == 0 {
            return Err(Error::InvalidGraph("vertex count must be positive".into()));
        }
        if !(w0.is_finite() && w1.is_finite()) || w0 < 0.0 || w1 <= w0 {
            return Err(Error::InvalidGraph(format!(
                "weights must satisfy 0 <= w0 < w1, got w0={w0}, w1={w1}"
            )));
        }
        let mut out_adj = vec![Vec::new(); n];
        let mut in_adj = vec![Vec::new(); n];
        let mut list = Vec::new();
        for (id, (tail, head, class)) in edges.into_iter().enumerate() {
            if tail >= n || head >= n {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} ({tail}->{head}) has an endpoint outside 0..{n}"
                )));
            }
            if tail == head {
                return Err(Error::InvalidGraph(format!(
                    "edge {id} is a self-loop at {tail}"
                )));
            }
            out_adj[tail].push(id);
            in_adj[head].push(id);
            list.push(Edge { tail, head, class });
        }
        Ok(Self {
            n,
            edges: list,
            w0,
            w1,
            out_adj,
            in_adj,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> Edge {
        self.edges[id]
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    pub fn w1(&self) -> f64 {
        self.w1
    }

    pub fn class_weight(&self, class: WeightClass) -> f64 {
        match class {
            WeightClass::Cheap => self.w0,
            WeightClass::Expensive => self.w1,
        }
    }

    pub fn weight(&self, id: EdgeId) -> f64 {
        self.class_weight(self.edges[id].class)
    }

    pub fn is_expensive(&self, id: EdgeId) -> bool {
        self.edges[id].class == WeightClass::Expensive
    }

    pub fn out_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.out_adj[v]
    }

    pub fn in_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.in_adj[v]
    }

    pub fn expensive_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(move |&e| self.is_expensive(e))
    }

    pub fn cheap_edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.edges.len()).filter(move |&e| !self.is_expensive(e))
    }

    /// `Σ w(e)·x_e`.
    pub fn weigh(&self, x: &[f64]) -> f64 {
        x.iter().enumerate().map(|(e, v)| self.weight(e) * v).sum()
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.is_strongly_connected_on(|_| true)
    }

    /// Strong connectivity of `(V, {e : keep(e)})`.
    pub fn is_strongly_connected_on(&self, keep: impl Fn(EdgeId) -> bool) -> bool {
        let reach = |forward: bool| {
            let mut seen = vec![false; self.n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(v) = stack.pop() {
                let adj = if forward {
                    &self.out_adj[v]
                } else {
                    &self.in_adj[v]
                };
                for &e in adj {
                    if !keep(e) {
                        continue;
                    }
                    let w = if forward {
                        self.edges[e].head
                    } else {
                        self.edges[e].tail
                    };
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(true) && reach(false)
    }

    /// Edges leaving (`Out`) or entering (`In`) the member set of `cut`.
    pub fn delta(&self, cut: &CutSpec, direction: Direction) -> Vec<EdgeId> {
        self.delta_of(cut.members(), direction)
    }

    /// `delta` on a raw membership vector; no proper-subset check.
    pub fn delta_of(&self, members: &[bool], direction: Direction) -> Vec<EdgeId> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| match direction {
                Direction::Out => members[e.tail] && !members[e.head],
                Direction::In => !members[e.tail] && members[e.head],
            })
            .map(|(id, _)| id)
            .collect()
    }

    /// `x(δ⁺(S))` for a raw membership vector.
    pub fn out_value(&self, members: &[bool], x: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(x)
            .filter(|(e, _)| members[e.tail] && !members[e.head])
            .map(|(_, v)| v)
            .sum()
    }

    pub fn in_value(&self, members: &[bool], x: &[f64]) -> f64 {
        self.edges
            .iter()
            .zip(x)
            .filter(|(e, _)| !members[e.tail] && members[e.head])
            .map(|(_, v)| v)
            .sum()
    }

    /// `x(δ⁻(v))` for every vertex.
    pub fn in_degrees(&self, x: &[f64]) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for (e, v) in self.edges.iter().zip(x) {
            deg[e.head] += v;
        }
        deg
    }

    pub fn out_degrees(&self, x: &[f64]) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for (e, v) in self.edges.iter().zip(x) {
            deg[e.tail] += v;
        }
        deg
    }

    /// Largest `|x(δ⁺(v)) − x(δ⁻(v))|` over all vertices.
    pub fn max_imbalance(&self, x: &[f64]) -> f64 {
        let din = self.in_degrees(x);
        let dout = self.out_degrees(x);
        din.iter()
            .zip(&dout)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// SCC decomposition of `(vertex_subset, edge_subset)`.
    pub fn strongly_connected_components(
        &self,
        vertex_subset: &[VertexId],
        edge_subset: &[EdgeId],
    ) -> SccDecomposition {
        let arcs: Vec<(VertexId, VertexId)> = edge_subset
            .iter()
            .map(|&e| (self.edges[e].tail, self.edges[e].head))
            .collect();
        SccDecomposition::compute(vertex_subset, &arcs)
    }
}

/// A proper nonempty vertex subset.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CutSpec {
    members: Vec<bool>,
}

impl CutSpec {
    pub fn new(n: usize, vertices: impl IntoIterator<Item = VertexId>) -> Result<Self> {
        let mut members = vec![false; n];
        for v in vertices {
            if v >= n {
                return Err(Error::InvalidCut);
            }
            members[v] = true;
        }
        Self::from_members(members)
    }

    pub fn from_members(members: Vec<bool>) -> Result<Self> {
        let count = members.iter().filter(|&&m| m).count();
        if count == 0 || count == members.len() {
            return Err(Error::InvalidCut);
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[bool] {
        &self.members
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.members[v]
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        (0..self.members.len())
            .filter(|&v| self.members[v])
            .collect()
    }

    pub fn complement(&self) -> CutSpec {
        CutSpec {
            members: self.members.iter().map(|m| !m).collect(),
        }
    }
}

/// Strongly connected components of a vertex subset under a set of arcs,
/// with the condensation DAG. Components are ordered by smallest vertex.
#[derive(Debug, Clone)]
pub struct SccDecomposition {
    pub components: Vec<Vec<VertexId>>,
    /// Condensation edges `(from, to)` between component indices, deduplicated.
    pub condensation: Vec<(usize, usize)>,
    component_of: std::collections::HashMap<VertexId, usize>,
}

impl SccDecomposition {
    /// Arcs with an endpoint outside `vertices` are ignored.
    pub fn compute(vertices: &[VertexId], arcs: &[(VertexId, VertexId)]) -> Self {
        use std::collections::HashMap;
        let mut sorted: Vec<VertexId> = vertices.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let local: HashMap<VertexId, usize> =
            sorted.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let k = sorted.len();
        let mut adj = vec![Vec::new(); k];
        for &(a, b) in arcs {
            if let (Some(&i), Some(&j)) = (local.get(&a), local.get(&b)) {
                adj[i].push(j);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }

        // Iterative Tarjan.
        const UNSEEN: usize = usize::MAX;
        let mut index = vec![UNSEEN; k];
        let mut low = vec![0; k];
        let mut on_stack = vec![false; k];
        let mut stack = Vec::new();
        let mut comp = vec![UNSEEN; k];
        let mut n_comp = 0;
        let mut counter = 0;
        for root in 0..k {
            if index[root] != UNSEEN {
                continue;
            }
            let mut call: Vec<(usize, usize)> = vec![(root, 0)];
            index[root] = counter;
            low[root] = counter;
            counter += 1;
            stack.push(root);
            on_stack[root] = true;
            while let Some(&mut (v, ref mut next)) = call.last_mut() {
                if *next < adj[v].len() {
                    let w = adj[v][*next];
                    *next += 1;
                    if index[w] == UNSEEN {
                        index[w] = counter;
                        low[w] = counter;
                        counter += 1;
                        stack.push(w);
                        on_stack[w] = true;
                        call.push((w, 0));
                    } else if on_stack[w] {
                        low[v] = low[v].min(index[w]);
                    }
                } else {
                    call.pop();
                    if let Some(&(parent, _)) = call.last() {
                        low[parent] = low[parent].min(low[v]);
                    }
                    if low[v] == index[v] {
                        loop {
                            let w = stack.pop().expect("tarjan stack");
                            on_stack[w] = false;
                            comp[w] = n_comp;
                            if w == v {
                                break;
                            }
                        }
                        n_comp += 1;
                    }
                }
            }
        }

        let mut members: Vec<Vec<VertexId>> = vec![Vec::new(); n_comp];
        for i in 0..k {
            members[comp[i]].push(sorted[i]);
        }
        // Reorder components by their smallest vertex.
        let mut order: Vec<usize> = (0..n_comp).collect();
        order.sort_by_key(|&c| members[c][0]);
        let mut rank = vec![0; n_comp];
        for (r, &c) in order.iter().enumerate() {
            rank[c] = r;
        }
        let components: Vec<Vec<VertexId>> = order
            .iter()
            .map(|&c| std::mem::take(&mut members[c]))
            .collect();
        let mut condensation = Vec::new();
        for i in 0..k {
            for &j in &adj[i] {
                let (a, b) = (rank[comp[i]], rank[comp[j]]);
                if a != b {
                    condensation.push((a, b));
                }
            }
        }
        condensation.sort_unstable();
        condensation.dedup();
        let component_of = (0..k).map(|i| (sorted[i], rank[comp[i]])).collect();
        Self {
            components,
            condensation,
            component_of,
        }
    }

    pub fn component_of(&self, v: VertexId) -> Option<usize> {
        self.component_of.get(&v).copied()
    }

    pub fn is_sink(&self, c: usize) -> bool {
        !self.condensation.iter().any(|&(a, _)| a == c)
    }

    /// Sink components, in order of smallest vertex.
    pub fn sinks(&self) -> Vec<usize> {
        (0..self.components.len())
            .filter(|&c| self.is_sink(c))
            .collect()
    }
}

/// A multisubset of edges, stored as a dense multiplicity vector.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeMultiset {
    mult: Vec<u64>,
}

/// A weak component of `(V, F)` together with the restriction of `F`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeakComponent {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<(EdgeId, u64)>,
}

impl EdgeMultiset {
    pub fn empty(edge_count: usize) -> Self {
        Self {
            mult: vec![0; edge_count],
        }
    }

    pub fn from_multiplicities(mult: Vec<u64>) -> Self {
        Self { mult }
    }

    pub fn multiplicities(&self) -> &[u64] {
        &self.mult
    }

    pub fn get(&self, e: EdgeId) -> u64 {
        self.mult[e]
    }

    pub fn add(&mut self, e: EdgeId, count: u64) {
        self.mult[e] += count;
    }

    pub fn set(&mut self, e: EdgeId, count: u64) {
        self.mult[e] = count;
    }

    pub fn add_all(&mut self, other: &EdgeMultiset) {
        for (a, b) in self.mult.iter_mut().zip(&other.mult) {
            *a += b;
        }
    }

    pub fn total(&self) -> u64 {
        self.mult.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.mult.iter().all(|&m| m == 0)
    }

    pub fn support(&self) -> impl Iterator<Item = (EdgeId, u64)> + '_ {
        self.mult
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(e, &m)| (e, m))
    }

    pub fn weight(&self, graph: &TwoWeightDigraph) -> f64 {
        self.support()
            .map(|(e, m)| graph.weight(e) * m as f64)
            .sum()
    }

    /// Per-vertex flag: in-multiplicity equals out-multiplicity.
    pub fn balance(&self, graph: &TwoWeightDigraph) -> Vec<bool> {
        let mut net = vec![0i64; graph.vertex_count()];
        for (e, m) in self.support() {
            let edge = graph.edge(e);
            net[edge.tail] += m as i64;
            net[edge.head] -= m as i64;
        }
        net.into_iter().map(|d| d == 0).collect()
    }

    pub fn is_eulerian(&self, graph: &TwoWeightDigraph) -> bool {
        self.balance(graph).into_iter().all(|b| b)
    }

    /// Weak components; untouched vertices become singletons. Ordered by
    /// smallest vertex.
    pub fn weak_components(&self, graph: &TwoWeightDigraph) -> Vec<WeakComponent> {
        let n = graph.vertex_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut v: usize) -> usize {
            while parent[v] != v {
                parent[v] = parent[parent[v]];
                v = parent[v];
            }
            v
        }
        for (e, _) in self.support() {
            let edge = graph.edge(e);
            let (a, b) = (find(&mut parent, edge.tail), find(&mut parent, edge.head));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let mut index_of_root = vec![usize::MAX; n];
        let mut comps: Vec<WeakComponent> = Vec::new();
        for v in 0..n {
            let r = find(&mut parent, v);
            if index_of_root[r] == usize::MAX {
                index_of_root[r] = comps.len();
                comps.push(WeakComponent {
                    vertices: Vec::new(),
                    edges: Vec::new(),
                });
            }
            comps[index_of_root[r]].vertices.push(v);
        }
        for (e, m) in self.support() {
            let r = find(&mut parent, graph.edge(e).tail);
            comps[index_of_root[r]].edges.push((e, m));
        }
        comps
    }
}

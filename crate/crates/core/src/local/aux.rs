//! Auxiliary graphs inside a partition class.

use std::collections::VecDeque;

use serde::Serialize;

use crate::graph::{EdgeId, SccDecomposition, TwoWeightDigraph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AuxKind {
    Cheap,
    Postpaid,
    Prepaid,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuxEdge {
    pub tail: VertexId,
    pub head: VertexId,
    pub kind: AuxKind,
    /// Edge ids of a fewest-edge qualifying path in `G[V_i]`.
    pub preimage: Vec<EdgeId>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AuxGraph {
    /// Sorted class members.
    pub vertices: Vec<VertexId>,
    pub edges: Vec<AuxEdge>,
    #[serde(skip)]
    out: Vec<Vec<usize>>,
    #[serde(skip)]
    local: Vec<usize>,
}

const NONE: usize = usize::MAX;

/// BFS over cheap edges inside `member`, skipping `avoid`. `forward` follows
/// edges tail→head, otherwise head→tail. Sources must be pre-sorted.
/// Returns the edge used to reach each vertex and its distance.
fn cheap_bfs(
    graph: &TwoWeightDigraph,
    member: &[bool],
    avoid: VertexId,
    sources: &[VertexId],
    forward: bool,
) -> (Vec<usize>, Vec<usize>) {
    let n = graph.vertex_count();
    let mut via = vec![NONE; n];
    let mut dist = vec![NONE; n];
    let mut queue = VecDeque::new();
    for &s in sources {
        if dist[s] == NONE && s != avoid {
            dist[s] = 0;
            queue.push_back(s);
        }
    }
    while let Some(v) = queue.pop_front() {
        let adj = if forward {
            graph.out_edges(v)
        } else {
            graph.in_edges(v)
        };
        let mut order: Vec<EdgeId> = adj.to_vec();
        order.sort_unstable();
        for e in order {
            if graph.is_expensive(e) {
                continue;
            }
            let edge = graph.edge(e);
            let w = if forward { edge.head } else { edge.tail };
            if !member[w] || w == avoid || dist[w] != NONE {
                continue;
            }
            dist[w] = dist[v] + 1;
            via[w] = e;
            queue.push_back(w);
        }
    }
    (via, dist)
}

/// Fewest-edge cheap path `from → to` inside `member`, ties by smallest edge id.
pub fn cheap_path(
    graph: &TwoWeightDigraph,
    member: &[bool],
    from: VertexId,
    to: VertexId,
) -> Option<Vec<EdgeId>> {
    if from == to {
        return Some(Vec::new());
    }
    let (via, dist) = cheap_bfs(graph, member, NONE, &[from], true);
    if dist[to] == NONE {
        return None;
    }
    let mut path = Vec::new();
    let mut v = to;
    while v != from {
        let e = via[v];
        path.push(e);
        v = graph.edge(e).tail;
    }
    path.reverse();
    Some(path)
}

impl AuxGraph {
    pub fn out_edges(&self, v: VertexId) -> &[usize] {
        match self.local.get(v) {
            Some(&i) if i != NONE => &self.out[i],
            _ => &[],
        }
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.local.get(v).is_some_and(|&i| i != NONE)
    }

    pub fn scc(&self) -> SccDecomposition {
        let arcs: Vec<_> = self.edges.iter().map(|e| (e.tail, e.head)).collect();
        SccDecomposition::compute(&self.vertices, &arcs)
    }

    /// Fewest-edge aux path; neighbours explored by head id, then kind.
    pub fn shortest_path(&self, from: VertexId, to: VertexId) -> Option<Vec<usize>> {
        if !self.contains(from) || !self.contains(to) {
            return None;
        }
        if from == to {
            return Some(Vec::new());
        }
        let mut via: Vec<usize> = vec![NONE; self.vertices.len()];
        let mut seen = vec![false; self.vertices.len()];
        seen[self.local[from]] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(v) = queue.pop_front() {
            for &a in self.out_edges(v) {
                let w = self.edges[a].head;
                let lw = self.local[w];
                if seen[lw] {
                    continue;
                }
                seen[lw] = true;
                via[lw] = a;
                if w == to {
                    let mut path = Vec::new();
                    let mut cur = to;
                    while cur != from {
                        let a = via[self.local[cur]];
                        path.push(a);
                        cur = self.edges[a].tail;
                    }
                    path.reverse();
                    return Some(path);
                }
                queue.push_back(w);
            }
        }
        None
    }

    /// Concatenated preimages of an aux path.
    pub fn expand(&self, path: &[usize]) -> Vec<EdgeId> {
        path.iter()
            .flat_map(|&a| self.edges[a].preimage.iter().copied())
            .collect()
    }
}

/// Aux graph of `class` with terminal set given by `is_terminal`.
pub fn build_aux_graph(
    graph: &TwoWeightDigraph,
    class: &[VertexId],
    is_terminal: &[bool],
) -> AuxGraph {
    let n = graph.vertex_count();
    let mut vertices = class.to_vec();
    vertices.sort_unstable();
    vertices.dedup();
    let mut member = vec![false; n];
    let mut local = vec![NONE; n];
    for (i, &v) in vertices.iter().enumerate() {
        member[v] = true;
        local[v] = i;
    }
    let mut edges: Vec<AuxEdge> = Vec::new();

    for &u in &vertices {
        // Cheap aux edges: one per head, smallest edge id.
        let mut cheap: Vec<(VertexId, EdgeId)> = graph
            .out_edges(u)
            .iter()
            .filter(|&&e| !graph.is_expensive(e) && member[graph.edge(e).head])
            .map(|&e| (graph.edge(e).head, e))
            .collect();
        cheap.sort_unstable();
        cheap.dedup_by_key(|p| p.0);
        for (v, e) in cheap {
            edges.push(AuxEdge {
                tail: u,
                head: v,
                kind: AuxKind::Cheap,
                preimage: vec![e],
            });
        }

        // Postpaid: u -> w expensive, then cheap w -> t avoiding u.
        let mut first: Vec<(VertexId, EdgeId)> = graph
            .out_edges(u)
            .iter()
            .filter(|&&e| graph.is_expensive(e) && member[graph.edge(e).head])
            .map(|&e| (graph.edge(e).head, e))
            .collect();
        first.sort_unstable();
        first.dedup_by_key(|p| p.0);
        if !first.is_empty() {
            let starts: Vec<VertexId> = first.iter().map(|p| p.0).collect();
            let (via, dist) = cheap_bfs(graph, &member, u, &starts, true);
            for &t in &vertices {
                if t == u || !is_terminal[t] || dist[t] == NONE {
                    continue;
                }
                let mut tail_part = Vec::new();
                let mut v = t;
                while dist[v] != 0 {
                    let e = via[v];
                    tail_part.push(e);
                    v = graph.edge(e).tail;
                }
                tail_part.reverse();
                let exp = first
                    .iter()
                    .find(|p| p.0 == v)
                    .expect("bfs root is a start")
                    .1;
                let mut preimage = vec![exp];
                preimage.extend(tail_part);
                edges.push(AuxEdge {
                    tail: u,
                    head: t,
                    kind: AuxKind::Postpaid,
                    preimage,
                });
            }
        }
    }

    // Prepaid: cheap t -> x avoiding v, then x -> v expensive.
    for &v in &vertices {
        let mut last: Vec<(VertexId, EdgeId)> = graph
            .in_edges(v)
            .iter()
            .filter(|&&e| graph.is_expensive(e) && member[graph.edge(e).tail])
            .map(|&e| (graph.edge(e).tail, e))
            .collect();
        last.sort_unstable();
        last.dedup_by_key(|p| p.0);
        if last.is_empty() {
            continue;
        }
        let starts: Vec<VertexId> = last.iter().map(|p| p.0).collect();
        let (via, dist) = cheap_bfs(graph, &member, v, &starts, false);
        for &t in &vertices {
            if t == v || !is_terminal[t] || dist[t] == NONE {
                continue;
            }
            let mut preimage = Vec::new();
            let mut x = t;
            while dist[x] != 0 {
                let e = via[x];
                preimage.push(e);
                x = graph.edge(e).head;
            }
            let exp = last
                .iter()
                .find(|p| p.0 == x)
                .expect("bfs root is a start")
                .1;
            preimage.push(exp);
            edges.push(AuxEdge {
                tail: t,
                head: v,
                kind: AuxKind::Prepaid,
                preimage,
            });
        }
    }

    edges.sort_by_key(|a| (a.tail, a.head, a.kind));
    let mut out = vec![Vec::new(); vertices.len()];
    for (i, e) in edges.iter().enumerate() {
        out[local[e.tail]].push(i);
    }
    AuxGraph {
        vertices,
        edges,
        out,
        local,
    }
}

/// The sink component containing the smallest vertex id among all sinks.
pub fn pick_sink_component(aux: &AuxGraph) -> Vec<VertexId> {
    let scc = aux.scc();
    match scc.sinks().first() {
        Some(&c) => scc.components[c].clone(),
        None => Vec::new(),
    }
}

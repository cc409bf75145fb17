//! Independent oracles and instance builders shared by the integration tests.
//!
//! Nothing here calls the checkers inside the library; every property is
//! recomputed from raw edge lists.

#![allow(dead_code)]

use lcatsp_core::generate::{generate, Family, GenParams};
use lcatsp_core::local::Partition;
use lcatsp_core::split::{ArcKind, SplitGraph};
use lcatsp_core::TwoWeightDigraph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const EPS_FEAS: f64 = 1e-7;
pub const EPS_OBJ: f64 = 1e-6;

struct Dsu(Vec<usize>);

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu((0..n).collect())
    }
    fn find(&mut self, v: usize) -> usize {
        let mut r = v;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut c = v;
        while self.0[c] != r {
            let next = self.0[c];
            self.0[c] = r;
            c = next;
        }
        r
    }
    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.0[a.max(b)] = a.min(b);
        }
    }
}

/// Weak components of the support of `mult`, each as (sorted vertices, weight).
pub fn components(g: &TwoWeightDigraph, mult: &[u64]) -> Vec<(Vec<usize>, f64)> {
    let n = g.vertex_count();
    let mut dsu = Dsu::new(n);
    for (e, edge) in g.edges().iter().enumerate() {
        if mult[e] > 0 {
            dsu.union(edge.tail, edge.head);
        }
    }
    let mut root_to_comp = std::collections::BTreeMap::new();
    let mut comps: Vec<(Vec<usize>, f64)> = Vec::new();
    for v in 0..n {
        let r = dsu.find(v);
        let id = *root_to_comp.entry(r).or_insert_with(|| {
            comps.push((Vec::new(), 0.0));
            comps.len() - 1
        });
        comps[id].0.push(v);
    }
    for (e, edge) in g.edges().iter().enumerate() {
        if mult[e] > 0 {
            let id = root_to_comp[&dsu.find(edge.tail)];
            let w = if edge.class == lcatsp_core::WeightClass::Expensive {
                g.w1()
            } else {
                g.w0()
            };
            comps[id].1 += w * mult[e] as f64;
        }
    }
    comps
}

pub fn is_eulerian(g: &TwoWeightDigraph, mult: &[u64]) -> bool {
    let mut bal = vec![0i64; g.vertex_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        bal[edge.tail] += mult[e] as i64;
        bal[edge.head] -= mult[e] as i64;
    }
    bal.iter().all(|&b| b == 0)
}

pub fn crosses(g: &TwoWeightDigraph, mult: &[u64], class: &[usize]) -> bool {
    let mut inside = vec![false; g.vertex_count()];
    for &v in class {
        inside[v] = true;
    }
    g.edges()
        .iter()
        .enumerate()
        .any(|(e, edge)| mult[e] > 0 && inside[edge.tail] && !inside[edge.head])
}

pub fn out_value(g: &TwoWeightDigraph, x: &[f64], inside: &[bool]) -> f64 {
    g.edges()
        .iter()
        .enumerate()
        .filter(|(_, edge)| inside[edge.tail] && !inside[edge.head])
        .map(|(e, _)| x[e])
        .sum()
}

pub fn in_degree(g: &TwoWeightDigraph, x: &[f64]) -> Vec<f64> {
    let mut d = vec![0.0; g.vertex_count()];
    for (e, edge) in g.edges().iter().enumerate() {
        d[edge.head] += x[e];
    }
    d
}

/// Every failed condition of the sink-flow contract against `x`.
pub fn sink_flow_violations(
    g: &TwoWeightDigraph,
    x: &[f64],
    f: &[f64],
    terminals: &[usize],
) -> Vec<String> {
    let mut out = Vec::new();
    let is_t = |v: usize| terminals.contains(&v);
    for (e, edge) in g.edges().iter().enumerate() {
        if f[e] > x[e] + 1e-9 {
            out.push(format!("f({e}) = {} > x = {}", f[e], x[e]));
        }
        if f[e] < -1e-9 {
            out.push(format!("f({e}) negative"));
        }
        let expensive = edge.class == lcatsp_core::WeightClass::Expensive;
        if expensive && (f[e] - x[e]).abs() > 1e-9 {
            out.push(format!(
                "expensive edge {e} not saturated: {} vs {}",
                f[e], x[e]
            ));
        }
        if !expensive && is_t(edge.tail) && f[e] > 1e-9 {
            out.push(format!(
                "cheap edge {e} leaves terminal {} with flow {}",
                edge.tail, f[e]
            ));
        }
    }
    let indeg = in_degree(g, f);
    for &t in terminals {
        if indeg[t] <= 1e-9 {
            out.push(format!("terminal {t} receives no flow"));
        }
    }
    out
}

/// Structural scan: the only free→debt arcs are expensive images, the only
/// debt→free arcs are discharges at terminals, and kinds match endpoints.
pub fn split_pattern_violations(split: &SplitGraph) -> Vec<String> {
    let mut out = Vec::new();
    for (i, a) in split.arcs.iter().enumerate() {
        let (td, hd) = (a.tail.0 % 2 == 1, a.head.0 % 2 == 1);
        let (tv, hv) = (a.tail.0 / 2, a.head.0 / 2);
        let ok = match a.kind {
            ArcKind::FreeCheap => !td && !hd,
            ArcKind::DebtCheap => td && hd,
            ArcKind::Expensive => !td && hd,
            ArcKind::Discharge => td && !hd && tv == hv && split.terminals.contains(&tv),
        };
        if !ok {
            out.push(format!(
                "arc {i} of kind {:?} has pattern {}→{}",
                a.kind, a.tail, a.head
            ));
        }
    }
    out
}

/// Imbalance of `values` on split nodes.
pub fn split_imbalance(split: &SplitGraph, values: &[f64]) -> f64 {
    let mut bal = vec![0.0; 2 * split.n];
    for (a, v) in split.arcs.iter().zip(values) {
        bal[a.tail.0] += v;
        bal[a.head.0] -= v;
    }
    bal.iter().map(|b: &f64| b.abs()).fold(0.0, f64::max)
}

/// `x_sp(δ⁺(S^sp))` with `S^sp = {v⁰, v¹ : v ∈ S}`.
pub fn split_image_out(split: &SplitGraph, values: &[f64], inside: &[bool]) -> f64 {
    split
        .arcs
        .iter()
        .zip(values)
        .filter(|(a, _)| inside[a.tail.0 / 2] && !inside[a.head.0 / 2])
        .map(|(_, v)| v)
        .sum()
}

/// Random proper nonempty subset.
pub fn random_cut(rng: &mut ChaCha8Rng, n: usize) -> Vec<bool> {
    loop {
        let s: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        let k = s.iter().filter(|b| **b).count();
        if k > 0 && k < n {
            return s;
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum PartitionKind {
    Singletons,
    RandomBlocks,
    SccAligned,
}

/// Strongly connected components of the cheap subgraph, by repeated reachability.
pub fn cheap_sccs(g: &TwoWeightDigraph) -> Vec<Vec<usize>> {
    let n = g.vertex_count();
    let reach = |from: usize, forward: bool| {
        let mut seen = vec![false; n];
        seen[from] = true;
        let mut stack = vec![from];
        while let Some(v) = stack.pop() {
            for edge in g.edges() {
                if edge.class != lcatsp_core::WeightClass::Cheap {
                    continue;
                }
                let (a, b) = if forward {
                    (edge.tail, edge.head)
                } else {
                    (edge.head, edge.tail)
                };
                if a == v && !seen[b] {
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        seen
    };
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for v in 0..n {
        if assigned[v] {
            continue;
        }
        let (f, b) = (reach(v, true), reach(v, false));
        let comp: Vec<usize> = (0..n).filter(|&u| f[u] && b[u]).collect();
        for &u in &comp {
            assigned[u] = true;
        }
        out.push(comp);
    }
    out
}

pub fn make_partition(
    g: &TwoWeightDigraph,
    kind: PartitionKind,
    rng: &mut ChaCha8Rng,
) -> Partition {
    let n = g.vertex_count();
    match kind {
        PartitionKind::Singletons => Partition::singletons(n),
        PartitionKind::RandomBlocks => {
            let k = rng.gen_range(2..=5usize).min(n);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(rng);
            let mut blocks = vec![Vec::new(); k];
            for (i, &v) in order.iter().enumerate() {
                let b = if i < k { i } else { rng.gen_range(0..k) };
                blocks[b].push(v);
            }
            Partition::new(n, blocks).unwrap()
        }
        PartitionKind::SccAligned => {
            let mut sccs = cheap_sccs(g);
            if sccs.len() == 1 {
                // A single cheap SCC: split it along a random cut instead.
                let cut = random_cut(rng, n);
                sccs = vec![
                    (0..n).filter(|&v| cut[v]).collect(),
                    (0..n).filter(|&v| !cut[v]).collect(),
                ];
            } else if sccs.len() > 2 && rng.gen_bool(0.5) {
                // Merge neighbours pairwise to get coarser blocks.
                let mut merged = Vec::new();
                for pair in sccs.chunks(2) {
                    merged.push(pair.concat());
                }
                sccs = merged;
            }
            Partition::new(n, sccs).unwrap()
        }
    }
}

/// Weight ratio choices.
pub const RATIOS: [f64; 3] = [2.0, 10.0, 1000.0];

pub fn gen(family: Family, n: usize, density: f64, w1: f64, seed: u64) -> TwoWeightDigraph {
    generate(&GenParams {
        family,
        n,
        density,
        w0: 1.0,
        w1,
        seed,
    })
    .unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

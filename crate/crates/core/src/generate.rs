//! Seeded instance generators.
//!
//! Every generator draws from `ChaCha8Rng::seed_from_u64(seed)`, so a
//! `(family, n, density, w0, w1, seed)` tuple always yields the same graph.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{TwoWeightDigraph, VertexId, WeightClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Cheap Hamiltonian cycle plus random edges of either class.
    RandomStrong,
    /// Copies of the six-vertex two-triangle gadget joined in a ring.
    Figure1Gadgets,
    /// Cheap strongly connected base, extra cheap edges, few expensive ones.
    CheapHeavy,
    /// Cheap clusters of 2 to 5 vertices joined only by expensive edges.
    ExpensiveHeavy,
}

impl Family {
    pub const ALL: [Family; 4] = [
        Family::RandomStrong,
        Family::Figure1Gadgets,
        Family::CheapHeavy,
        Family::ExpensiveHeavy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::RandomStrong => "random-strong",
            Family::Figure1Gadgets => "figure1-gadgets",
            Family::CheapHeavy => "cheap-heavy",
            Family::ExpensiveHeavy => "expensive-heavy",
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidGraph(format!("unknown generator family `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GenParams {
    pub family: Family,
    pub n: usize,
    pub density: f64,
    pub w0: f64,
    pub w1: f64,
    pub seed: u64,
}

pub fn generate(p: &GenParams) -> Result<TwoWeightDigraph> {
    if p.n < 2 {
        return Err(Error::InvalidGraph("generators need n >= 2".into()));
    }
    if !(0.0..=1.0).contains(&p.density) {
        return Err(Error::InvalidGraph(format!(
            "density {} outside [0, 1]",
            p.density
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let edges = match p.family {
        Family::RandomStrong => random_strong(&mut rng, p.n, p.density),
        Family::Figure1Gadgets => figure1_gadgets(p.n)?,
        Family::CheapHeavy => cheap_heavy(&mut rng, p.n, p.density),
        Family::ExpensiveHeavy => expensive_heavy(&mut rng, p.n, p.density),
    };
    TwoWeightDigraph::new(p.n, p.w0, p.w1, edges)
}

type EdgeList = Vec<(VertexId, VertexId, WeightClass)>;

fn random_strong(rng: &mut ChaCha8Rng, n: usize, density: f64) -> EdgeList {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges: EdgeList = (0..n)
        .map(|i| (order[i], order[(i + 1) % n], WeightClass::Cheap))
        .collect();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen_bool(density) {
                let class = if rng.gen_bool(0.5) {
                    WeightClass::Cheap
                } else {
                    WeightClass::Expensive
                };
                edges.push((u, v, class));
            }
        }
    }
    edges
}

/// Cheap strongly connected base on `vertices`: a path in random order plus
/// one back edge from every later vertex to a random earlier one.
fn cheap_ears(rng: &mut ChaCha8Rng, vertices: &[VertexId], edges: &mut EdgeList) {
    let mut order = vertices.to_vec();
    order.shuffle(rng);
    for i in 1..order.len() {
        edges.push((order[i - 1], order[i], WeightClass::Cheap));
        let j = rng.gen_range(0..i);
        edges.push((order[i], order[j], WeightClass::Cheap));
    }
}

fn cheap_heavy(rng: &mut ChaCha8Rng, n: usize, density: f64) -> EdgeList {
    let vertices: Vec<usize> = (0..n).collect();
    let mut edges = Vec::new();
    cheap_ears(rng, &vertices, &mut edges);
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            if rng.gen_bool(density) {
                edges.push((u, v, WeightClass::Cheap));
            }
            if rng.gen_bool(density / 4.0) {
                edges.push((u, v, WeightClass::Expensive));
            }
        }
    }
    edges
}

fn expensive_heavy(rng: &mut ChaCha8Rng, n: usize, density: f64) -> EdgeList {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    let mut at = 0;
    while at < n {
        let remaining = n - at;
        let mut size = rng.gen_range(2..=5usize).min(remaining);
        if clusters.is_empty() && size == remaining {
            size = (remaining / 2).max(1);
        }
        clusters.push(order[at..at + size].to_vec());
        at += size;
    }
    let mut cluster_of = vec![0; n];
    for (c, members) in clusters.iter().enumerate() {
        for &v in members {
            cluster_of[v] = c;
        }
    }
    let mut edges = Vec::new();
    for members in &clusters {
        cheap_ears(rng, members, &mut edges);
    }
    let k = clusters.len();
    for c in 0..k {
        let from = *clusters[c].choose(rng).expect("nonempty cluster");
        let to = *clusters[(c + 1) % k].choose(rng).expect("nonempty cluster");
        edges.push((from, to, WeightClass::Expensive));
    }
    for u in 0..n {
        for v in 0..n {
            if u == v || !rng.gen_bool(density) {
                continue;
            }
            let class = if cluster_of[u] == cluster_of[v] {
                WeightClass::Cheap
            } else {
                WeightClass::Expensive
            };
            edges.push((u, v, class));
        }
    }
    edges
}

/// Vertex names of one gadget, in id order.
pub const GADGET_NAMES: [&str; 6] = ["a", "b", "c", "d", "e", "g"];

/// The six-vertex gadget: cheap triangles a→b→c→a and d→e→g→d, and
/// expensive edges in both directions between a–d, b–e and c–g.
pub fn figure1_edges(offset: usize) -> EdgeList {
    let (a, b, c, d, e, g) = (
        offset,
        offset + 1,
        offset + 2,
        offset + 3,
        offset + 4,
        offset + 5,
    );
    use WeightClass::{Cheap, Expensive};
    vec![
        (a, b, Cheap),
        (b, c, Cheap),
        (c, a, Cheap),
        (d, e, Cheap),
        (e, g, Cheap),
        (g, d, Cheap),
        (a, d, Expensive),
        (d, a, Expensive),
        (b, e, Expensive),
        (e, b, Expensive),
        (c, g, Expensive),
        (g, c, Expensive),
    ]
}

fn figure1_gadgets(n: usize) -> Result<EdgeList> {
    if !n.is_multiple_of(6) {
        return Err(Error::InvalidGraph(format!(
            "figure1-gadgets needs n divisible by 6, got {n}"
        )));
    }
    let k = n / 6;
    let mut edges = Vec::new();
    for j in 0..k {
        edges.extend(figure1_edges(6 * j));
    }
    if k > 1 {
        for j in 0..k {
            edges.push((6 * j, 6 * ((j + 1) % k), WeightClass::Expensive));
        }
    }
    Ok(edges)
}

/// The single gadget with `w₀ = 1`, `w₁ = 2`.
pub fn figure1() -> TwoWeightDigraph {
    TwoWeightDigraph::new(6, 1.0, 2.0, figure1_edges(0)).expect("gadget is valid")
}

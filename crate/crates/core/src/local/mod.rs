//! Eulerian multisets crossing every class of a vertex partition.
//!
//! [`prepare`] does the partition-independent work (sink flow, split graph,
//! lower bound, or the reduction to cheap edges when `x*(E₁) < 1`), and
//! [`solve_local_connectivity`] runs the rerouting for one partition.

pub mod aux;
pub mod integral;
pub mod reroute;
pub mod unweighted;
pub mod weighted;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow_routing::{route, SinkFlow};
use crate::graph::{EdgeId, EdgeMultiset, TwoWeightDigraph, VertexId};
use crate::held_karp::FractionalCirculation;
use crate::split::{build_split, compute_lower_bound, LowerBound, SplitCirculation, SplitGraph};
use crate::tol;
use crate::verify::{debt_audit, verify_solution, Certificate};

/// A partition of the vertex set into nonempty classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Partition {
    pub classes: Vec<Vec<VertexId>>,
    #[serde(skip)]
    class_of: Vec<usize>,
}

impl Partition {
    pub fn new(n: usize, classes: Vec<Vec<VertexId>>) -> Result<Self> {
        let mut class_of = vec![usize::MAX; n];
        let mut sorted = Vec::with_capacity(classes.len());
        for (i, class) in classes.into_iter().enumerate() {
            if class.is_empty() {
                return Err(Error::InvalidPartition(format!("class {i} is empty")));
            }
            let mut class = class;
            class.sort_unstable();
            for &v in &class {
                if v >= n {
                    return Err(Error::InvalidPartition(format!("vertex {v} out of range")));
                }
                if class_of[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
                }
                class_of[v] = i;
            }
            sorted.push(class);
        }
        if let Some(v) = class_of.iter().position(|&c| c == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "vertex {v} is in no class"
            )));
        }
        Ok(Self {
            classes: sorted,
            class_of,
        })
    }

    pub fn singletons(n: usize) -> Self {
        Self::new(n, (0..n).map(|v| vec![v]).collect()).expect("singletons partition V")
    }

    pub fn class_of(&self, v: VertexId) -> usize {
        self.class_of[v]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn vertex_count(&self) -> usize {
        self.class_of.len()
    }

    pub fn members(&self, i: usize) -> Vec<bool> {
        let mut m = vec![false; self.class_of.len()];
        for &v in &self.classes[i] {
            m[v] = true;
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    /// `x*(E₁) ≥ 1`: split graph and auxiliary-graph rerouting.
    Weighted,
    /// `x*(E₁) < 1`: expensive edges replaced by cheap paths.
    SixLight,
}

/// Partition-independent data.
#[derive(Debug, Clone)]
pub enum Prepared {
    Weighted {
        x: FractionalCirculation,
        sink: SinkFlow,
        split: SplitGraph,
        xsp: SplitCirculation,
        lower: LowerBound,
    },
    SixLight {
        x: FractionalCirculation,
        /// Cheap-edge circulation replacing `x*`.
        x_prime: Vec<f64>,
        lower: LowerBound,
    },
}

impl Prepared {
    pub fn lower(&self) -> &LowerBound {
        match self {
            Prepared::Weighted { lower, .. } | Prepared::SixLight { lower, .. } => lower,
        }
    }

    pub fn x(&self) -> &FractionalCirculation {
        match self {
            Prepared::Weighted { x, .. } | Prepared::SixLight { x, .. } => x,
        }
    }

    pub fn branch(&self) -> Branch {
        match self {
            Prepared::Weighted { .. } => Branch::Weighted,
            Prepared::SixLight { .. } => Branch::SixLight,
        }
    }
}

/// Chooses the branch by `x*(E₁) ≥ 1 − ε_feas` and builds its data.
pub fn prepare(graph: &TwoWeightDigraph, x: &FractionalCirculation) -> Result<Prepared> {
    let mass = x.expensive_mass(graph);
    if mass >= 1.0 - tol::feas() {
        let sink = route(graph, x)?;
        let (split, xsp) = build_split(graph, x, &sink)?;
        let lower = compute_lower_bound(graph, x, &sink)?;
        Ok(Prepared::Weighted {
            x: x.clone(),
            sink,
            split,
            xsp,
            lower,
        })
    } else {
        let x_prime = unweighted::replace_expensive(graph, x)?;
        let lower = unweighted::unweighted_lower_bound(graph, &x_prime);
        Ok(Prepared::SixLight {
            x: x.clone(),
            x_prime,
            lower,
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PatchWalk {
    pub class: usize,
    pub u: VertexId,
    pub v: VertexId,
    pub edges: Vec<EdgeId>,
    /// The walk ends with a cheap path from this terminal.
    pub via_terminal: Option<VertexId>,
    /// Entering arc is a debt arc and leaving arc starts at a free node.
    pub bad: bool,
}

/// Split-level provenance of a two-weight solution.
#[derive(Debug, Clone, Serialize)]
pub struct SplitProvenance {
    /// Integral pseudo-flow on split arcs.
    pub y_sp: Vec<u64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LcSolution {
    pub branch: Branch,
    #[serde(serialize_with = "ser_multiset")]
    pub f: EdgeMultiset,
    /// Pseudo-flow part of `F` on edges of `G`.
    pub y: Vec<u64>,
    pub walks: Vec<PatchWalk>,
    pub provenance: Option<SplitProvenance>,
    /// The partition had a single class, which cannot be crossed.
    pub vacuous_crossing: bool,
    pub certificate: Certificate,
}

fn ser_multiset<S: serde::Serializer>(
    f: &EdgeMultiset,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(None)?;
    for item in f.support() {
        seq.serialize_element(&item)?;
    }
    seq.end()
}

pub(crate) struct RawSolution {
    pub y: Vec<u64>,
    pub walks: Vec<PatchWalk>,
    pub provenance: Option<SplitProvenance>,
}

impl RawSolution {
    pub fn multiset(&self) -> EdgeMultiset {
        let mut f = EdgeMultiset::from_multiplicities(self.y.clone());
        for w in &self.walks {
            for &e in &w.edges {
                f.add(e, 1);
            }
        }
        f
    }
}

/// Runs the branch chosen by [`prepare`] and verifies the result.
///
/// A single class `V₁ = V` cannot be crossed; it is solved as the singleton
/// partition and reported with `vacuous_crossing`.
pub fn solve_local_connectivity(
    graph: &TwoWeightDigraph,
    prepared: &Prepared,
    partition: &Partition,
) -> Result<LcSolution> {
    let sol = solve_uncertified(graph, prepared, partition)?;
    if !sol.certificate.passed {
        return Err(Error::Verification(sol.certificate.failure_summary()));
    }
    Ok(sol)
}

/// Like [`solve_local_connectivity`] but returns a failing certificate
/// instead of an error.
pub fn solve_uncertified(
    graph: &TwoWeightDigraph,
    prepared: &Prepared,
    partition: &Partition,
) -> Result<LcSolution> {
    if partition.vertex_count() != graph.vertex_count() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} vertices, graph has {}",
            partition.vertex_count(),
            graph.vertex_count()
        )));
    }
    let vacuous = partition.len() == 1;
    let singletons;
    let working = if vacuous {
        singletons = Partition::singletons(graph.vertex_count());
        &singletons
    } else {
        partition
    };
    let raw = match prepared {
        Prepared::Weighted {
            x,
            sink,
            split,
            xsp,
            lower,
        } => weighted::run(graph, x, sink, split, xsp, lower, working)?,
        Prepared::SixLight { x_prime, .. } => unweighted::three_light(graph, x_prime, working)?,
    };
    let f = raw.multiset();
    let mut certificate = verify_solution(graph, prepared.lower(), partition, &f);
    if let (Prepared::Weighted { split, .. }, Some(prov)) = (prepared, &raw.provenance) {
        certificate.debt_audit = Some(debt_audit(graph, split, &prov.y_sp, &raw.walks, &f));
        certificate.refresh_passed();
    }
    Ok(LcSolution {
        branch: prepared.branch(),
        f,
        y: raw.y,
        walks: raw.walks,
        provenance: raw.provenance,
        vacuous_crossing: vacuous,
        certificate,
    })
}

/// Checks a patch walk: it is a `u → v` walk of edges inside `class`.
pub(crate) fn check_walk(graph: &TwoWeightDigraph, class: &[bool], walk: &PatchWalk) -> Result<()> {
    let mut at = walk.u;
    for &e in &walk.edges {
        let edge = graph.edge(e);
        if edge.tail != at {
            return Err(Error::InvalidWalk(format!(
                "patch walk of class {} breaks at edge {e}",
                walk.class
            )));
        }
        if !class[edge.tail] || !class[edge.head] {
            return Err(Error::InvalidWalk(format!(
                "patch walk of class {} leaves its class at edge {e}",
                walk.class
            )));
        }
        at = edge.head;
    }
    if at != walk.v {
        return Err(Error::InvalidWalk(format!(
            "patch walk of class {} ends at {at}, expected {}",
            walk.class, walk.v
        )));
    }
    Ok(())
}

//! Solver-independent certification of local-connectivity solutions.

use serde::Serialize;

use crate::graph::{EdgeId, EdgeMultiset, TwoWeightDigraph, VertexId};
use crate::local::{Partition, PatchWalk};
use crate::split::{ArcKind, LowerBound, SplitGraph, LBS_SCALE, LIGHTNESS_TARGET};

/// Relative slack on the lightness inequalities.
pub const RATIO_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase", tag = "status", content = "witness")]
pub enum Crossing {
    /// Smallest-id edge of `F` leaving the class.
    Crossed(EdgeId),
    /// The class is all of `V`.
    Vacuous,
    Missing,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComponentReport {
    pub vertices: Vec<VertexId>,
    pub weight: f64,
    pub lbs: f64,
    pub lb: f64,
    /// `weight / lb`; `None` when that is infinite.
    pub ratio: Option<f64>,
    pub within_lbs: bool,
    pub within_lb: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct DebtRecord {
    pub first_vertex: VertexId,
    pub debt: f64,
    pub bad: usize,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Certificate {
    pub eulerian_ok: bool,
    pub unbalanced: Vec<VertexId>,
    pub crossings: Vec<Crossing>,
    #[serde(rename = "per_component")]
    pub components: Vec<ComponentReport>,
    pub max_ratio: Option<f64>,
    /// The `10·lbs` and `100·lb` forms agree on every component.
    pub scale_forms_agree: bool,
    pub debt_audit: Option<Vec<DebtRecord>>,
    pub passed: bool,
}

impl Certificate {
    pub fn refresh_passed(&mut self) {
        let debt_ok = self
            .debt_audit
            .as_ref()
            .is_none_or(|d| d.iter().all(|r| r.ok));
        self.passed = self.eulerian_ok
            && self.scale_forms_agree
            && self.crossings.iter().all(|c| *c != Crossing::Missing)
            && self.components.iter().all(|c| c.within_lb && c.within_lbs)
            && debt_ok;
    }

    pub fn failure_summary(&self) -> String {
        let mut parts = Vec::new();
        if !self.eulerian_ok {
            parts.push(format!("unbalanced vertices {:?}", self.unbalanced));
        }
        for (i, c) in self.crossings.iter().enumerate() {
            if *c == Crossing::Missing {
                parts.push(format!("class {i} not crossed"));
            }
        }
        for c in &self.components {
            if !(c.within_lb && c.within_lbs) {
                parts.push(format!(
                    "component of vertex {} has weight {} against lb {}",
                    c.vertices[0], c.weight, c.lb
                ));
            }
        }
        if !self.scale_forms_agree {
            parts.push("10·lbs and 100·lb checks disagree".into());
        }
        if let Some(d) = &self.debt_audit {
            for r in d.iter().filter(|r| !r.ok) {
                parts.push(format!(
                    "component of vertex {} has debt {} above {} bad walks",
                    r.first_vertex, r.debt, r.bad
                ));
            }
        }
        if parts.is_empty() {
            "no failure".into()
        } else {
            parts.join("; ")
        }
    }
}

/// Recomputes balance, crossings and component lightness from scratch.
pub fn verify_solution(
    graph: &TwoWeightDigraph,
    lower: &LowerBound,
    partition: &Partition,
    f: &EdgeMultiset,
) -> Certificate {
    let n = graph.vertex_count();
    let balance = f.balance(graph);
    let unbalanced: Vec<VertexId> = (0..n).filter(|&v| !balance[v]).collect();
    let crossings = (0..partition.len())
        .map(|i| {
            if partition.classes[i].len() == n {
                return Crossing::Vacuous;
            }
            let members = partition.members(i);
            f.support()
                .map(|(e, _)| e)
                .find(|&e| {
                    let edge = graph.edge(e);
                    members[edge.tail] && !members[edge.head]
                })
                .map_or(Crossing::Missing, Crossing::Crossed)
        })
        .collect();
    let mut components = Vec::new();
    let mut max_ratio = Some(0.0f64);
    let mut agree = true;
    for comp in f.weak_components(graph) {
        let weight: f64 = comp
            .edges
            .iter()
            .map(|&(e, m)| graph.weight(e) * m as f64)
            .sum();
        let lbs = lower.lbs_sum(comp.vertices.iter().copied());
        let lb = lower.lb_sum(comp.vertices.iter().copied());
        let ratio = if weight == 0.0 {
            Some(0.0)
        } else if lb > 0.0 {
            Some(weight / lb)
        } else {
            None
        };
        let within_lbs = weight <= LBS_SCALE * lbs * (1.0 + RATIO_SLACK);
        let within_lb = weight <= LIGHTNESS_TARGET * lb * (1.0 + RATIO_SLACK);
        agree &= within_lbs == within_lb;
        max_ratio = match (max_ratio, ratio) {
            (Some(a), Some(b)) => Some(a.max(b)),
            _ => None,
        };
        components.push(ComponentReport {
            vertices: comp.vertices,
            weight,
            lbs,
            lb,
            ratio,
            within_lbs,
            within_lb,
        });
    }
    let mut cert = Certificate {
        eulerian_ok: unbalanced.is_empty(),
        unbalanced,
        crossings,
        components,
        max_ratio,
        scale_forms_agree: agree,
        debt_audit: None,
        passed: false,
    };
    cert.refresh_passed();
    cert
}

/// Per component of `F`: `debt = y_sp(expensive images) − y_sp(discharges)`
/// must not exceed the number of bad patch walks inside it.
pub fn debt_audit(
    graph: &TwoWeightDigraph,
    split: &SplitGraph,
    y_sp: &[u64],
    walks: &[PatchWalk],
    f: &EdgeMultiset,
) -> Vec<DebtRecord> {
    let n = graph.vertex_count();
    let comps = f.weak_components(graph);
    let mut comp_of = vec![0; n];
    for (c, comp) in comps.iter().enumerate() {
        for &v in &comp.vertices {
            comp_of[v] = c;
        }
    }
    let mut debt = vec![0.0; comps.len()];
    for (a, &val) in split.arcs.iter().zip(y_sp) {
        let c = comp_of[a.tail.vertex()];
        match a.kind {
            ArcKind::Expensive => debt[c] += val as f64,
            ArcKind::Discharge => debt[c] -= val as f64,
            _ => {}
        }
    }
    let mut bad = vec![0usize; comps.len()];
    for w in walks {
        if w.bad {
            bad[comp_of[w.u]] += 1;
        }
    }
    comps
        .iter()
        .enumerate()
        .map(|(c, comp)| DebtRecord {
            first_vertex: comp.vertices[0],
            debt: debt[c],
            bad: bad[c],
            ok: debt[c] <= bad[c] as f64 + 1e-9,
        })
        .collect()
}

//! The Held-Karp relaxation: cutting planes with min-cut separation, and a
//! full cut enumeration oracle for small graphs.

use std::collections::HashSet;

use minilp::{ComparisonOp, OptimizationDirection, Problem};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::flow::FlowNetwork;
use crate::graph::{CutSpec, TwoWeightDigraph};
use crate::lp::{map_error, sorted_terms};
use crate::simplex::solve_dual_simplex;
use crate::tol;

/// Largest vertex count accepted by [`enumerate_held_karp`].
pub const ENUMERATION_MAX_N: usize = 10;

/// A nonnegative edge vector with its objective value.
#[derive(Debug, Clone, Serialize)]
pub struct FractionalCirculation {
    pub values: Vec<f64>,
    pub objective: f64,
    /// Cutting-plane rounds (zero for vectors not produced by the solver).
    pub iterations: usize,
    pub cut_rows: usize,
}

impl FractionalCirculation {
    /// Wraps `values`, clamping tiny entries to zero and recomputing the objective.
    pub fn from_values(graph: &TwoWeightDigraph, values: Vec<f64>) -> Result<Self> {
        if values.len() != graph.edge_count() {
            return Err(Error::InvalidGraph(format!(
                "solution has {} values for {} edges",
                values.len(),
                graph.edge_count()
            )));
        }
        if values.iter().any(|v| !v.is_finite() || *v < -tol::feas()) {
            return Err(Error::InvalidGraph(
                "solution has a negative or non-finite value".into(),
            ));
        }
        let values: Vec<f64> = values.into_iter().map(tol::clamp_zero).collect();
        let objective = graph.weigh(&values);
        Ok(Self {
            values,
            objective,
            iterations: 0,
            cut_rows: 0,
        })
    }

    pub fn expensive_mass(&self, graph: &TwoWeightDigraph) -> f64 {
        graph.expensive_edges().map(|e| self.values[e]).sum()
    }
}

/// A cut with its value `x(δ⁺(S))`.
#[derive(Debug, Clone)]
pub struct ViolatedCut {
    pub cut: CutSpec,
    pub value: f64,
}

fn min_cut(graph: &TwoWeightDigraph, x: &[f64], s: usize, t: usize) -> (f64, Vec<bool>) {
    let mut net = FlowNetwork::<f64>::new(graph.vertex_count());
    for (e, edge) in graph.edges().iter().enumerate() {
        if x[e] > 0.0 {
            net.add_arc(edge.tail, edge.head, x[e]);
        }
    }
    let value = net.max_flow(s, t);
    (value, net.source_side(s))
}

/// Every distinct cut found by the `2(n−1)` max-flow computations whose value
/// is below `1 − ε_feas`, smallest value first.
pub fn separate_all(graph: &TwoWeightDigraph, x: &[f64]) -> Vec<ViolatedCut> {
    let threshold = 1.0 - tol::feas();
    let mut seen = HashSet::new();
    let mut found = Vec::new();
    for t in 1..graph.vertex_count() {
        for (s, sink) in [(0, t), (t, 0)] {
            let (value, side) = min_cut(graph, x, s, sink);
            if value < threshold && seen.insert(side.clone()) {
                let value = graph.out_value(&side, x);
                let cut = CutSpec::from_members(side).expect("min cut separates s and t");
                found.push(ViolatedCut { cut, value });
            }
        }
    }
    found.sort_by(|a, b| a.value.total_cmp(&b.value));
    found
}

/// A globally minimum cut if its value is below `1 − ε_feas`.
pub fn separate(graph: &TwoWeightDigraph, x: &[f64]) -> Option<ViolatedCut> {
    separate_all(graph, x).into_iter().next()
}

/// Cutting-plane solve of the Held-Karp relaxation.
pub fn solve_held_karp(graph: &TwoWeightDigraph) -> Result<FractionalCirculation> {
    if !graph.is_strongly_connected() {
        return Err(Error::NotStronglyConnected);
    }
    let n = graph.vertex_count();
    let m = graph.edge_count();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = (0..m)
        .map(|e| problem.add_var(graph.weight(e), (0.0, f64::INFINITY)))
        .collect();
    // One balance row is implied by the others.
    for v in 0..n - 1 {
        let mut terms: Vec<(usize, f64)> = graph.out_edges(v).iter().map(|&e| (e, 1.0)).collect();
        terms.extend(graph.in_edges(v).iter().map(|&e| (e, -1.0)));
        problem.add_constraint(sorted_terms(&terms, &vars), ComparisonOp::Eq, 0.0);
    }
    for v in 0..n {
        let terms: Vec<(usize, f64)> = graph.out_edges(v).iter().map(|&e| (e, 1.0)).collect();
        problem.add_constraint(sorted_terms(&terms, &vars), ComparisonOp::Ge, 1.0);
    }
    let mut cut_rows = n;
    let mut solution = problem.solve().map_err(map_error)?;
    let limit = 10 * n * m.max(1);
    let mut iterations = 1;
    let mut added: HashSet<Vec<bool>> = HashSet::new();
    loop {
        let x: Vec<f64> = vars
            .iter()
            .map(|&v| solution.var_value(v).max(0.0))
            .collect();
        let cuts = separate_all(graph, &x);
        if cuts.is_empty() {
            let mut fc = FractionalCirculation::from_values(graph, x)?;
            fc.iterations = iterations;
            fc.cut_rows = cut_rows;
            return Ok(fc);
        }
        if iterations >= limit {
            return Err(Error::IterationLimit { limit });
        }
        let mut progress = false;
        for vc in cuts {
            if !added.insert(vc.cut.members().to_vec()) {
                continue;
            }
            progress = true;
            let terms: Vec<(usize, f64)> = graph
                .delta_of(vc.cut.members(), crate::graph::Direction::Out)
                .into_iter()
                .map(|e| (e, 1.0))
                .collect();
            solution = solution
                .add_constraint(sorted_terms(&terms, &vars), ComparisonOp::Ge, 1.0)
                .map_err(map_error)?;
            cut_rows += 1;
        }
        if !progress {
            return Err(Error::inconsistency(
                "separation returned only cuts already in the model",
            ));
        }
        iterations += 1;
    }
}

/// Exact Held-Karp optimum with all `2ⁿ − 2` cut rows, for `n ≤ 10`.
pub fn enumerate_held_karp(graph: &TwoWeightDigraph) -> Result<FractionalCirculation> {
    let n = graph.vertex_count();
    if n > ENUMERATION_MAX_N {
        return Err(Error::TooLarge {
            n,
            max: ENUMERATION_MAX_N,
        });
    }
    if n < 2 {
        return Err(Error::InvalidGraph("need at least two vertices".into()));
    }
    let m = graph.edge_count();
    let mut rows: Vec<(Vec<f64>, f64)> = Vec::new();
    for v in 0..n {
        let mut coef = vec![0.0; m];
        for &e in graph.out_edges(v) {
            coef[e] += 1.0;
        }
        for &e in graph.in_edges(v) {
            coef[e] -= 1.0;
        }
        let neg: Vec<f64> = coef.iter().map(|c| -c).collect();
        rows.push((coef, 0.0));
        rows.push((neg, 0.0));
    }
    for mask in 1u32..(1u32 << n) - 1 {
        let mut coef = vec![0.0; m];
        for (e, edge) in graph.edges().iter().enumerate() {
            let tail_in = mask >> edge.tail & 1 == 1;
            let head_in = mask >> edge.head & 1 == 1;
            if tail_in && !head_in {
                coef[e] = -1.0;
            }
        }
        rows.push((coef, -1.0));
    }
    let costs: Vec<f64> = (0..m).map(|e| graph.weight(e)).collect();
    let res = solve_dual_simplex(&costs, &rows)?;
    FractionalCirculation::from_values(graph, res.x)
}

/// All cut violations of `x` by brute force, for small `n`.
pub fn min_cut_value_exhaustive(graph: &TwoWeightDigraph, x: &[f64]) -> f64 {
    let n = graph.vertex_count();
    assert!(n <= 20, "exhaustive cut scan is exponential");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << n) - 1 {
        let members: Vec<bool> = (0..n).map(|v| mask >> v & 1 == 1).collect();
        best = best.min(graph.out_value(&members, x));
    }
    best
}

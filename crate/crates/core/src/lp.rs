//! Small linear-programming front end over `minilp`.

use minilp::{ComparisonOp, OptimizationDirection, Problem};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Eq,
    Ge,
    Le,
}

#[derive(Debug, Clone)]
pub struct Row {
    pub terms: Vec<(usize, f64)>,
    pub kind: RowKind,
    pub rhs: f64,
}

/// Minimize `objective · x` over `x ≥ 0` subject to `rows`.
#[derive(Debug, Clone, Default)]
pub struct LpModel {
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpModel {
    pub fn new(objective: Vec<f64>) -> Self {
        Self {
            objective,
            rows: Vec::new(),
        }
    }

    pub fn var_count(&self) -> usize {
        self.objective.len()
    }

    pub fn add_row(&mut self, terms: Vec<(usize, f64)>, kind: RowKind, rhs: f64) {
        self.rows.push(Row { terms, kind, rhs });
    }

    /// Largest row violation of `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        for row in &self.rows {
            let lhs: f64 = row.terms.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match row.kind {
                RowKind::Eq => (lhs - row.rhs).abs(),
                RowKind::Ge => (row.rhs - lhs).max(0.0),
                RowKind::Le => (lhs - row.rhs).max(0.0),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

pub(crate) fn sorted_terms(
    terms: &[(usize, f64)],
    vars: &[minilp::Variable],
) -> Vec<(minilp::Variable, f64)> {
    let mut merged: Vec<(usize, f64)> = terms.to_vec();
    merged.sort_by_key(|&(j, _)| j);
    merged.dedup_by(|b, a| {
        if a.0 == b.0 {
            a.1 += b.1;
            true
        } else {
            false
        }
    });
    merged.into_iter().map(|(j, a)| (vars[j], a)).collect()
}

pub(crate) fn op(kind: RowKind) -> ComparisonOp {
    match kind {
        RowKind::Eq => ComparisonOp::Eq,
        RowKind::Ge => ComparisonOp::Ge,
        RowKind::Le => ComparisonOp::Le,
    }
}

pub(crate) fn map_error(e: minilp::Error) -> Error {
    match e {
        minilp::Error::Infeasible => Error::LpInfeasible,
        minilp::Error::Unbounded => Error::LpUnbounded,
    }
}

/// Solve `model` with a primal/dual simplex. Deterministic for a fixed model.
pub fn lp_solve(model: &LpModel) -> Result<LpSolution> {
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let vars: Vec<_> = model
        .objective
        .iter()
        .map(|&c| problem.add_var(c, (0.0, f64::INFINITY)))
        .collect();
    for row in &model.rows {
        problem.add_constraint(sorted_terms(&row.terms, &vars), op(row.kind), row.rhs);
    }
    let solution = problem.solve().map_err(map_error)?;
    if !solution.objective().is_finite() {
        return Err(Error::LpUnbounded);
    }
    let values = vars.iter().map(|&v| *solution.var_value(v)).collect();
    Ok(LpSolution {
        values,
        objective: solution.objective(),
    })
}

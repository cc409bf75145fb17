//! Dense dictionary dual simplex for `min c·x, A x ≤ b, x ≥ 0` with `c ≥ 0`.
//!
//! Kept separate from the `minilp` route so the two LP paths can check each
//! other.

use crate::error::{Error, Result};

const PIVOT_EPS: f64 = 1e-9;
const STALL_LIMIT: usize = 50;

pub struct DualSimplexResult {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

/// Rows are `(coefficients, rhs)` meaning `Σ a_j x_j ≤ rhs`.
pub fn solve_dual_simplex(c: &[f64], rows: &[(Vec<f64>, f64)]) -> Result<DualSimplexResult> {
    let n = c.len();
    let r = rows.len();
    if c.iter().any(|&v| v < 0.0) {
        return Err(Error::inconsistency(
            "dual simplex requires nonnegative costs",
        ));
    }
    // Dictionary: x_B[i] = beta[i] + Σ_k a[i][k] · x_N[k].
    let mut a: Vec<Vec<f64>> = rows
        .iter()
        .map(|(coef, _)| coef.iter().map(|v| -v).collect())
        .collect();
    let mut beta: Vec<f64> = rows.iter().map(|(_, b)| *b).collect();
    let mut d: Vec<f64> = c.to_vec();
    let mut z0 = 0.0;
    let mut basic: Vec<usize> = (n..n + r).collect();
    let mut nonbasic: Vec<usize> = (0..n).collect();

    let max_pivots = 50 * (n + r) + 1000;
    let mut pivots = 0;
    let mut stall = 0;
    let mut last_z = f64::NEG_INFINITY;
    loop {
        let bland = stall >= STALL_LIMIT;
        let leave = if bland {
            (0..r)
                .filter(|&i| beta[i] < -PIVOT_EPS)
                .min_by_key(|&i| basic[i])
        } else {
            (0..r)
                .filter(|&i| beta[i] < -PIVOT_EPS)
                .min_by(|&i, &j| beta[i].total_cmp(&beta[j]).then(basic[i].cmp(&basic[j])))
        };
        let Some(row) = leave else { break };

        let mut enter: Option<usize> = None;
        let mut best = f64::INFINITY;
        for k in 0..n {
            let coef = a[row][k];
            if coef > PIVOT_EPS {
                let ratio = d[k].max(0.0) / coef;
                let better = match enter {
                    None => true,
                    Some(e) => {
                        ratio < best - 1e-12 || (ratio <= best + 1e-12 && nonbasic[k] < nonbasic[e])
                    }
                };
                if better {
                    best = ratio;
                    enter = Some(k);
                }
            }
        }
        let Some(col) = enter else {
            return Err(Error::LpInfeasible);
        };

        let piv = a[row][col];
        let old_row = std::mem::take(&mut a[row]);
        let mut new_row: Vec<f64> = old_row.iter().map(|v| -v / piv).collect();
        new_row[col] = 1.0 / piv;
        let new_beta = -beta[row] / piv;
        for i in 0..r {
            if i == row {
                continue;
            }
            let aij = a[i][col];
            if aij == 0.0 {
                continue;
            }
            let target = &mut a[i];
            for k in 0..n {
                if k == col {
                    target[k] = aij * new_row[col];
                } else {
                    target[k] += aij * new_row[k];
                }
            }
            beta[i] += aij * new_beta;
        }
        let dj = d[col];
        for k in 0..n {
            if k == col {
                d[k] = dj * new_row[col];
            } else {
                d[k] += dj * new_row[k];
            }
        }
        z0 += dj * new_beta;
        a[row] = new_row;
        beta[row] = new_beta;
        std::mem::swap(&mut basic[row], &mut nonbasic[col]);

        pivots += 1;
        if pivots > max_pivots {
            return Err(Error::IterationLimit { limit: max_pivots });
        }
        if z0 > last_z + 1e-12 {
            last_z = z0;
            stall = 0;
        } else {
            stall += 1;
        }
    }

    let mut x = vec![0.0; n];
    for (i, &var) in basic.iter().enumerate() {
        if var < n {
            x[var] = beta[i].max(0.0);
        }
    }
    let objective = c.iter().zip(&x).map(|(ci, xi)| ci * xi).sum();
    Ok(DualSimplexResult {
        x,
        objective,
        pivots,
    })
}

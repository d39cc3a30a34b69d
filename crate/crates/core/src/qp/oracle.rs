//! Brute-force reference solver for small problems.
//!
//! Shares nothing with the active-set solver: it enumerates every subset of
//! at most `dim` constraints, projects `û` onto the affine set where that
//! subset holds with equality, and keeps the best feasible candidate. A grid
//! scan over the box is run alongside as a sanity net. Meant for tests and
//! dimensions up to four.

use super::{QpProblem, QpSolution, QpStatus};
use nalgebra::{DMatrix, DVector};

/// Feasibility tolerance for oracle candidates.
pub const ORACLE_TOL: f64 = 1e-9;

fn all_rows(p: &QpProblem) -> Vec<(Vec<f64>, f64)> {
    let n = p.dim();
    let mut out: Vec<(Vec<f64>, f64)> = p.rows.iter().map(|r| (r.a.clone(), r.b)).collect();
    for c in 0..n {
        for sign in [1.0, -1.0] {
            let mut a = vec![0.0; n];
            a[c] = sign;
            out.push((a, p.bounds[c]));
        }
    }
    out
}

fn combinations(m: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..m {
        cur.push(i);
        combinations(m, k, i + 1, cur, out);
        cur.pop();
    }
}

/// Project `u_hat` onto `{u : a_k·u = b_k, k ∈ subset}`; `None` if the normals
/// are linearly dependent.
fn project(u_hat: &[f64], rows: &[(Vec<f64>, f64)], subset: &[usize]) -> Option<Vec<f64>> {
    let n = u_hat.len();
    let k = subset.len();
    let a = DMatrix::from_fn(k, n, |r, c| rows[subset[r]].0[c]);
    let b = DVector::from_fn(k, |r, _| rows[subset[r]].1);
    let x0 = DVector::from_column_slice(u_hat);
    let gram = &a * a.transpose();
    if gram.determinant().abs() < 1e-12 * gram.norm().max(1.0).powi(k as i32) {
        return None;
    }
    let y = gram.lu().solve(&(&a * &x0 - b))?;
    let x = x0 - a.transpose() * y;
    Some(x.iter().copied().collect())
}

pub fn brute_force_oracle(p: &QpProblem, grid_step: f64) -> QpSolution {
    let n = p.dim();
    assert!(n <= 4, "oracle is limited to four variables");
    let rows = all_rows(p);
    let mut best: Option<(f64, Vec<f64>)> = None;
    let mut consider = |u: Vec<f64>| {
        if p.is_feasible(&u, ORACLE_TOL) {
            let f = p.objective(&u);
            if best.as_ref().is_none_or(|(g, _)| f < *g) {
                best = Some((f, u));
            }
        }
    };

    consider(p.u_hat.clone());
    for k in 1..=n.min(rows.len()) {
        let mut subsets = Vec::new();
        combinations(rows.len(), k, 0, &mut Vec::new(), &mut subsets);
        for s in subsets {
            if let Some(u) = project(&p.u_hat, &rows, &s) {
                consider(u);
            }
        }
    }

    if grid_step > 0.0 {
        let counts: Vec<usize> = p
            .bounds
            .iter()
            .map(|b| (2.0 * b / grid_step).floor() as usize + 1)
            .collect();
        let total: usize = counts.iter().product();
        let mut u = vec![0.0; n];
        for flat in 0..total {
            let mut rem = flat;
            for c in 0..n {
                let idx = rem % counts[c];
                rem /= counts[c];
                u[c] = -p.bounds[c] + idx as f64 * grid_step;
            }
            // Grid points are kept only when strictly feasible.
            if p.is_feasible(&u, 0.0) {
                consider(u.clone());
            }
        }
    }

    match best {
        Some((objective, u_star)) => {
            let active_set = p
                .rows
                .iter()
                .enumerate()
                .filter(|(_, r)| r.violation(&u_star).abs() <= ORACLE_TOL)
                .map(|(k, _)| k)
                .collect();
            QpSolution {
                objective,
                active_set,
                row_multipliers: Vec::new(),
                box_multipliers: Vec::new(),
                u_star,
                status: QpStatus::Optimal,
                iterations: 0,
            }
        }
        None => QpSolution {
            u_star: p.u_hat.clone(),
            status: QpStatus::Infeasible,
            active_set: Vec::new(),
            row_multipliers: Vec::new(),
            box_multipliers: Vec::new(),
            objective: f64::INFINITY,
            iterations: 0,
        },
    }
}

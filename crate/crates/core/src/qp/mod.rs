//! Minimally invasive control filter.
//!
//! Solves
//!
//! ```text
//! min ‖u − û‖²   s.t.   a_k · u ≤ b_k,   |u_c| ≤ bound_c
//! ```
//!
//! The objective is a Euclidean projection, so the dual active-set method of
//! Goldfarb and Idnani specialises nicely: it starts at the unconstrained
//! minimiser `û`, never needs a feasible starting point, and reports
//! infeasibility when a violated constraint can be made active by no dual
//! step (the dual ray is a Farkas certificate).

pub mod oracle;

use crate::barrier::HalfspaceRow;
use nalgebra::{DMatrix, DVector};

/// Rows are considered satisfied when `a·u − b ≤ FEAS_TOL · max(1, ‖a‖)`.
pub const FEAS_TOL: f64 = 1e-11;
const DUAL_TOL: f64 = 1e-12;
const DEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct QpProblem {
    pub u_hat: Vec<f64>,
    pub rows: Vec<HalfspaceRow>,
    /// Per-component box bound, `|u_c| ≤ bounds[c]`.
    pub bounds: Vec<f64>,
}

impl QpProblem {
    pub fn new(u_hat: Vec<f64>, rows: Vec<HalfspaceRow>, bounds: Vec<f64>) -> Self {
        debug_assert_eq!(u_hat.len(), bounds.len());
        debug_assert!(rows.iter().all(|r| r.dim() == u_hat.len()));
        Self {
            u_hat,
            rows,
            bounds,
        }
    }

    /// Single-agent problem with a square acceleration box.
    pub fn per_agent(u_hat: [f64; 2], rows: Vec<HalfspaceRow>, alpha: f64) -> Self {
        Self::new(u_hat.to_vec(), rows, vec![alpha; 2])
    }

    pub fn dim(&self) -> usize {
        self.u_hat.len()
    }

    /// Number of constraints including the two box faces per component.
    pub fn n_constraints(&self) -> usize {
        self.rows.len() + 2 * self.dim()
    }

    pub fn objective(&self, u: &[f64]) -> f64 {
        u.iter()
            .zip(&self.u_hat)
            .map(|(x, y)| (x - y) * (x - y))
            .sum()
    }

    /// Constraint `k` in `a·u ≤ b` form. Indexes past the user rows address
    /// the box: `rows.len() + 2c` is `u_c ≤ bound_c`, `+ 1` is `−u_c ≤ bound_c`.
    fn constraint(&self, k: usize) -> (DVector<f64>, f64) {
        let n = self.dim();
        if k < self.rows.len() {
            let r = &self.rows[k];
            (DVector::from_column_slice(&r.a), r.b)
        } else {
            let f = k - self.rows.len();
            let c = f / 2;
            let sign = if f.is_multiple_of(2) { 1.0 } else { -1.0 };
            let mut a = DVector::zeros(n);
            a[c] = sign;
            (a, self.bounds[c])
        }
    }

    pub fn max_violation(&self, u: &[f64]) -> f64 {
        let rows = self.rows.iter().map(|r| r.violation(u));
        let boxv = u.iter().zip(&self.bounds).map(|(x, b)| x.abs() - b);
        rows.chain(boxv).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_feasible(&self, u: &[f64], tol: f64) -> bool {
        self.rows.iter().all(|r| r.violation(u) <= tol)
            && u.iter().zip(&self.bounds).all(|(x, b)| x.abs() <= b + tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QpStatus {
    Optimal,
    /// The polytope is empty.
    Infeasible,
    /// Iteration budget exhausted; callers treat this as infeasible.
    MaxIterations,
}

impl QpStatus {
    pub fn is_optimal(self) -> bool {
        matches!(self, QpStatus::Optimal)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpSolution {
    pub u_star: Vec<f64>,
    pub status: QpStatus,
    /// Indices into `rows` that are in the final working set, ascending.
    pub active_set: Vec<usize>,
    /// Row multipliers for the `‖u − û‖²` objective:
    /// `u* − û = −½ (Σ λ_k a_k + μ)`.
    pub row_multipliers: Vec<f64>,
    /// Signed box multipliers `μ`, positive on an upper face.
    pub box_multipliers: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct QpSolver {
    /// Iteration budget as a multiple of the constraint count.
    pub iteration_factor: usize,
}

impl Default for QpSolver {
    fn default() -> Self {
        Self {
            iteration_factor: 10,
        }
    }
}

/// Solve with the default solver settings.
pub fn solve(p: &QpProblem) -> QpSolution {
    QpSolver::default().solve(p)
}

struct WorkingSet {
    /// Constraint indices, in insertion order.
    idx: Vec<usize>,
    /// Outward normals `a_k` of the active constraints.
    normals: Vec<DVector<f64>>,
}

impl WorkingSet {
    /// Primal direction `z` (the part of `−a_p` orthogonal to the active
    /// normals) and dual direction `r`, the least-squares coefficients of
    /// `−a_p` on the active inward normals. Moving along `z` decreases
    /// `a_p · u` without disturbing the active constraints.
    fn directions(&self, a_p: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        let n_p = -a_p;
        if self.normals.is_empty() {
            return (n_p, DVector::zeros(0));
        }
        // Active normals in ≥ form, as columns.
        let cols: Vec<DVector<f64>> = self.normals.iter().map(|a| -a).collect();
        let nmat = DMatrix::from_columns(&cols);
        let qr = nmat.qr();
        let q = qr.q();
        let r = qr.r();
        let qt_np = q.transpose() * &n_p;
        let z = &n_p - &q * &qt_np;
        let dual = r
            .solve_upper_triangular(&qt_np)
            .unwrap_or_else(|| DVector::from_element(self.idx.len(), f64::NAN));
        (z, dual)
    }

    fn remove(&mut self, pos: usize) {
        self.idx.remove(pos);
        self.normals.remove(pos);
    }
}

impl QpSolver {
    pub fn solve(&self, p: &QpProblem) -> QpSolution {
        let n = p.dim();
        let m = p.n_constraints();
        let max_iter = self.iteration_factor * m.max(1);
        let mut x = DVector::from_column_slice(&p.u_hat);
        let constraints: Vec<(DVector<f64>, f64)> = (0..m).map(|k| p.constraint(k)).collect();
        let scale: Vec<f64> = constraints.iter().map(|(a, _)| a.norm().max(1.0)).collect();

        let mut ws = WorkingSet {
            idx: Vec::new(),
            normals: Vec::new(),
        };
        let mut duals: Vec<f64> = Vec::new();
        let mut iterations = 0usize;

        let status = 'outer: loop {
            // Most violated constraint, lowest index on ties.
            let mut pick: Option<(usize, f64)> = None;
            for (k, (a, b)) in constraints.iter().enumerate() {
                if ws.idx.contains(&k) {
                    continue;
                }
                let v = (a.dot(&x) - b) / scale[k];
                if v > FEAS_TOL && pick.is_none_or(|(_, best)| v > best) {
                    pick = Some((k, v));
                }
            }
            let Some((pk, _)) = pick else {
                break QpStatus::Optimal;
            };
            let (a_p, b_p) = &constraints[pk];
            let mut dual_p = 0.0;

            loop {
                iterations += 1;
                if iterations > max_iter {
                    break 'outer QpStatus::MaxIterations;
                }
                let (z, r) = ws.directions(a_p);
                if r.iter().any(|v| !v.is_finite()) {
                    break 'outer QpStatus::MaxIterations;
                }
                // Largest dual step keeping active multipliers non-negative.
                let mut t1 = f64::INFINITY;
                let mut drop_at = None;
                for (pos, (&rj, &uj)) in r.iter().zip(&duals).enumerate() {
                    if rj > DUAL_TOL {
                        let t = uj / rj;
                        if t < t1 {
                            t1 = t;
                            drop_at = Some(pos);
                        }
                    }
                }
                // Full step onto constraint p.
                let zn = -z.dot(a_p);
                let t2 = if z.norm() <= DEP_TOL * a_p.norm() || zn <= 0.0 {
                    f64::INFINITY
                } else {
                    (a_p.dot(&x) - b_p) / zn
                };
                let t = t1.min(t2);
                if t.is_infinite() {
                    break 'outer QpStatus::Infeasible;
                }
                if t2.is_finite() {
                    x += &z * t;
                }
                for (uj, rj) in duals.iter_mut().zip(r.iter()) {
                    *uj -= t * rj;
                }
                dual_p += t;
                if t2 <= t1 {
                    ws.idx.push(pk);
                    ws.normals.push(a_p.clone());
                    duals.push(dual_p);
                    break;
                }
                let pos = drop_at.expect("partial step implies a blocking multiplier");
                ws.remove(pos);
                duals.remove(pos);
            }
        };

        let u_star: Vec<f64> = x.iter().copied().collect();
        let mut row_multipliers = vec![0.0; p.rows.len()];
        let mut box_multipliers = vec![0.0; n];
        for (&k, &mu) in ws.idx.iter().zip(&duals) {
            // Internal multipliers belong to ½‖u − û‖²; report them for ‖u − û‖².
            let lambda = 2.0 * mu;
            if k < p.rows.len() {
                row_multipliers[k] = lambda;
            } else {
                let f = k - p.rows.len();
                let sign = if f.is_multiple_of(2) { 1.0 } else { -1.0 };
                box_multipliers[f / 2] += sign * lambda;
            }
        }
        let mut active_set: Vec<usize> = ws
            .idx
            .iter()
            .copied()
            .filter(|&k| k < p.rows.len())
            .collect();
        active_set.sort_unstable();
        QpSolution {
            objective: p.objective(&u_star),
            u_star,
            status,
            active_set,
            row_multipliers,
            box_multipliers,
            iterations,
        }
    }
}

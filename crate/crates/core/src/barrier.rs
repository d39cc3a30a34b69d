//! Pairwise barrier values and the linear safety constraints built from them.
//!
//! For a pair (i, j) with combined braking capability `A = α_i + α_j` the
//! barrier is
//!
//! ```text
//! h_ij = sqrt(2 A (‖Δp‖ − Ds)) + Δpᵀ Δv / ‖Δp‖
//! ```
//!
//! and enforcing `ḣ_ij + γ h_ij³ ≥ 0` is linear in the accelerations. The
//! ensemble form is a single row over all agents' controls. The decentralized
//! strategies split that row into one halfspace per agent such that the two
//! halves add back up to the ensemble row.

use crate::agent::{relative_state, AgentError, AgentParams, AgentState, RelativeState, Vec2};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BarrierError {
    #[error("invalid barrier parameters: {0}")]
    InvalidParameters(String),
    #[error("pair ({i}, {j}) already inside safety distance: dist {dist} <= Ds {ds}")]
    AlreadyViolated {
        i: usize,
        j: usize,
        dist: f64,
        ds: f64,
    },
    #[error("pair ({i}, {j}) has coincident positions")]
    Degenerate { i: usize, j: usize },
}

/// How the pairwise safety distance `Ds_ij` is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SafetyDistance {
    Fixed(f64),
    /// `Ds_ij = r_i + r_j`
    SumOfRadii,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierConfig {
    pub ds_mode: SafetyDistance,
    /// Floor on `‖Δp‖ − Ds` inside square-root denominators (m).
    pub epsilon: f64,
}

impl Default for BarrierConfig {
    fn default() -> Self {
        Self {
            ds_mode: SafetyDistance::SumOfRadii,
            epsilon: 1e-6,
        }
    }
}

impl BarrierConfig {
    pub fn safety_distance(&self, ri: f64, rj: f64) -> f64 {
        match self.ds_mode {
            SafetyDistance::Fixed(ds) => ds,
            SafetyDistance::SumOfRadii => ri + rj,
        }
    }

    pub fn pair_distance(&self, params: &[AgentParams], i: usize, j: usize) -> f64 {
        self.safety_distance(params[i].radius, params[j].radius)
    }

    pub fn validate(&self) -> Result<(), BarrierError> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(BarrierError::InvalidParameters(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let SafetyDistance::Fixed(ds) = self.ds_mode {
            if !(ds.is_finite() && ds > self.epsilon) {
                return Err(BarrierError::InvalidParameters(format!(
                    "fixed Ds must be positive and larger than epsilon, got {ds}"
                )));
            }
        }
        Ok(())
    }
}

/// One linear constraint `a · u ≤ b`.
///
/// Per-agent rows have a 2-vector `a` over that agent's control; ensemble rows
/// have `2N` entries with agent `k` occupying `a[2k..2k+2]`. `pair` records
/// which two agents produced the row (owner first for per-agent rows).
#[derive(Debug, Clone, PartialEq)]
pub struct HalfspaceRow {
    pub a: Vec<f64>,
    pub b: f64,
    pub pair: (usize, usize),
}

impl HalfspaceRow {
    pub fn new(a: Vec<f64>, b: f64, pair: (usize, usize)) -> Self {
        Self { a, b, pair }
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    pub fn lhs(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(self.a.len(), u.len());
        self.a.iter().zip(u).map(|(a, x)| a * x).sum()
    }

    /// `a · u − b`; positive means violated.
    pub fn violation(&self, u: &[f64]) -> f64 {
        self.lhs(u) - self.b
    }

    pub fn is_satisfied(&self, u: &[f64], tol: f64) -> bool {
        self.violation(u) <= tol
    }

    /// Lift a per-agent row owned by `agent` into ensemble coordinates.
    pub fn embed(&self, agent: usize, n_agents: usize) -> HalfspaceRow {
        debug_assert_eq!(self.a.len(), 2);
        let mut a = vec![0.0; 2 * n_agents];
        a[2 * agent] = self.a[0];
        a[2 * agent + 1] = self.a[1];
        HalfspaceRow::new(a, self.b, self.pair)
    }

    /// Row-wise sum, used to check that decentralized halves recombine.
    pub fn sum(&self, other: &HalfspaceRow) -> HalfspaceRow {
        debug_assert_eq!(self.a.len(), other.a.len());
        let a = self.a.iter().zip(&other.a).map(|(x, y)| x + y).collect();
        HalfspaceRow::new(a, self.b + other.b, self.pair)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierValue {
    pub h: f64,
    /// `dist ≤ Ds`: the square-root term was clamped to zero.
    pub inside_safety_disk: bool,
}

/// Barrier value for a relative state with combined acceleration `alpha_sum`.
pub fn h_ij(rel: &RelativeState, alpha_sum: f64, ds: f64) -> Result<BarrierValue, BarrierError> {
    if !(alpha_sum.is_finite() && alpha_sum > 0.0) {
        return Err(BarrierError::InvalidParameters(format!(
            "alpha_sum must be positive, got {alpha_sum}"
        )));
    }
    let margin = rel.dist - ds;
    let inside = margin <= 0.0;
    let root = (2.0 * alpha_sum * margin.max(0.0)).sqrt();
    Ok(BarrierValue {
        h: root + rel.vbar,
        inside_safety_disk: inside,
    })
}

/// Barrier value of pair (i, j) with the agents' true acceleration limits.
pub fn pair_h(
    i: usize,
    j: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<BarrierValue, BarrierError> {
    let rel =
        relative_state(&states[i], &states[j]).map_err(|_| BarrierError::Degenerate { i, j })?;
    h_ij(
        &rel,
        params[i].accel_limit + params[j].accel_limit,
        cfg.pair_distance(params, i, j),
    )
}

/// Shared intermediate quantities for one ordered pair.
struct PairTerms {
    rel: RelativeState,
    alpha_sum: f64,
    h: f64,
    /// sqrt(2 · A · max(dist − Ds, ε))
    root: f64,
}

impl PairTerms {
    fn new(
        i: usize,
        j: usize,
        states: &[AgentState],
        params: &[AgentParams],
        alpha_sum: f64,
        cfg: &BarrierConfig,
    ) -> Result<Self, BarrierError> {
        let rel = relative_state(&states[i], &states[j]).map_err(|e| match e {
            AgentError::Coincident => BarrierError::Degenerate { i, j },
            other => BarrierError::InvalidParameters(other.to_string()),
        })?;
        let ds = cfg.pair_distance(params, i, j);
        if rel.dist <= ds {
            return Err(BarrierError::AlreadyViolated {
                i,
                j,
                dist: rel.dist,
                ds,
            });
        }
        let h = h_ij(&rel, alpha_sum, ds)?.h;
        let root = (2.0 * alpha_sum * (rel.dist - ds).max(cfg.epsilon)).sqrt();
        Ok(Self {
            rel,
            alpha_sum,
            h,
            root,
        })
    }

    fn share(alpha_self: f64, alpha_sum: f64) -> f64 {
        alpha_self / alpha_sum
    }

    /// Right-hand side of the ensemble row for a given γ.
    fn ensemble_bound(&self, gamma: f64) -> f64 {
        let d = self.rel.dist;
        let dpdv = self.rel.dp_dot_dv();
        gamma * self.h.powi(3) * d - dpdv * dpdv / (d * d)
            + self.rel.dv.norm_squared()
            + self.alpha_sum * dpdv / self.root
    }
}

fn per_agent_a(dp: &Vec2) -> Vec<f64> {
    vec![-dp.x, -dp.y]
}

/// Ensemble row for pair (i, j) with γ = γ_i.
pub fn centralized_row(
    i: usize,
    j: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<HalfspaceRow, BarrierError> {
    centralized_row_with_gamma(i, j, states, params, cfg, params[i].gamma)
}

/// Ensemble row for pair (i, j) with an explicit global γ.
pub fn centralized_row_with_gamma(
    i: usize,
    j: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
    gamma: f64,
) -> Result<HalfspaceRow, BarrierError> {
    let alpha_sum = params[i].accel_limit + params[j].accel_limit;
    let t = PairTerms::new(i, j, states, params, alpha_sum, cfg)?;
    let mut a = vec![0.0; 2 * states.len()];
    a[2 * i] = -t.rel.dp.x;
    a[2 * i + 1] = -t.rel.dp.y;
    a[2 * j] = t.rel.dp.x;
    a[2 * j + 1] = t.rel.dp.y;
    Ok(HalfspaceRow::new(a, t.ensemble_bound(gamma), (i, j)))
}

/// Strategy A: split the barrier's increase rate, keeping each agent's own
/// drift term. Row for `me` against `other`, scaled by ‖Δp‖ so that rows are
/// commensurate with the ensemble row.
pub fn strategy_a_row(
    me: usize,
    other: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<HalfspaceRow, BarrierError> {
    let alpha_sum = params[me].accel_limit + params[other].accel_limit;
    let t = PairTerms::new(me, other, states, params, alpha_sum, cfg)?;
    let d = t.rel.dist;
    let dp = t.rel.dp;
    let v_me = states[me].v;
    let dp_v = dp.dot(&v_me);
    // ‖Δp‖ · (∂h/∂p_me)ᵀ v_me
    let drift =
        alpha_sum * dp_v / t.root + t.rel.dv.dot(&v_me) - t.rel.dp_dot_dv() * dp_v / (d * d);
    let share = PairTerms::share(params[me].accel_limit, alpha_sum);
    let b = d * share * params[me].gamma * t.h.powi(3) + drift;
    Ok(HalfspaceRow::new(per_agent_a(&dp), b, (me, other)))
}

pub fn strategy_a_rows(
    i: usize,
    j: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<(HalfspaceRow, HalfspaceRow), BarrierError> {
    Ok((
        strategy_a_row(i, j, states, params, cfg)?,
        strategy_a_row(j, i, states, params, cfg)?,
    ))
}

/// Strategy B: hand each agent a share of the ensemble bound proportional to
/// its acceleration limit.
pub fn strategy_b_row(
    me: usize,
    other: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<HalfspaceRow, BarrierError> {
    let alpha_sum = params[me].accel_limit + params[other].accel_limit;
    let t = PairTerms::new(me, other, states, params, alpha_sum, cfg)?;
    let share = PairTerms::share(params[me].accel_limit, alpha_sum);
    let b = share * t.ensemble_bound(params[me].gamma);
    Ok(HalfspaceRow::new(per_agent_a(&t.rel.dp), b, (me, other)))
}

pub fn strategy_b_rows(
    i: usize,
    j: usize,
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Result<(HalfspaceRow, HalfspaceRow), BarrierError> {
    Ok((
        strategy_b_row(i, j, states, params, cfg)?,
        strategy_b_row(j, i, states, params, cfg)?,
    ))
}

/// Strategy C (hybrid): velocity terms that are agent-local go to their
/// owner; the terms carrying the acceleration limits are shared.
///
/// Reads only `params[me]` (α, γ) and the other agent's radius for `Ds`.
/// `alpha_other` is either the neighbor's true limit or an estimate of it.
pub fn strategy_c_row(
    me: usize,
    other: usize,
    states: &[AgentState],
    params: &[AgentParams],
    alpha_other: f64,
    cfg: &BarrierConfig,
) -> Result<HalfspaceRow, BarrierError> {
    if !(alpha_other.is_finite() && alpha_other > 0.0) {
        return Err(BarrierError::InvalidParameters(format!(
            "neighbor acceleration limit must be positive, got {alpha_other}"
        )));
    }
    let alpha_me = params[me].accel_limit;
    let alpha_sum = alpha_me + alpha_other;
    let t = PairTerms::new(me, other, states, params, alpha_sum, cfg)?;
    let d = t.rel.dist;
    let dp = t.rel.dp;
    let dpdv = t.rel.dp_dot_dv();
    let v_me = states[me].v;
    let local = -(dpdv / (d * d)) * dp.dot(&v_me) + t.rel.dv.dot(&v_me);
    let shared = params[me].gamma * t.h.powi(3) * d + alpha_sum * dpdv / t.root;
    let b = local + PairTerms::share(alpha_me, alpha_sum) * shared;
    Ok(HalfspaceRow::new(per_agent_a(&dp), b, (me, other)))
}

/// Radius beyond which agent `i` need not form a barrier with anyone.
pub fn neighbor_radius(params_i: &AgentParams, alpha_min: f64, beta_max: f64, ds: f64) -> f64 {
    let alpha_sum = params_i.accel_limit + alpha_min;
    let reach = (2.0 * alpha_sum / params_i.gamma).cbrt() + params_i.speed_limit + beta_max;
    ds + reach * reach / (2.0 * alpha_sum)
}

/// Agent `i`'s neighbor disk and the bounds it was derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborInfo {
    pub d_n: f64,
    pub alpha_min: f64,
    pub beta_max: f64,
}

impl NeighborInfo {
    /// `ds` should be the largest safety distance agent `i` has with anyone,
    /// which makes one disk valid for every pair.
    pub fn new(params_i: &AgentParams, alpha_min: f64, beta_max: f64, ds: f64) -> Self {
        Self {
            d_n: neighbor_radius(params_i, alpha_min, beta_max, ds),
            alpha_min,
            beta_max,
        }
    }

    /// Bounds taken from the other agents' true parameters.
    pub fn from_team(i: usize, params: &[AgentParams], cfg: &BarrierConfig) -> Option<Self> {
        let others = || params.iter().enumerate().filter(move |(k, _)| *k != i);
        let alpha_min = others().map(|(_, p)| p.accel_limit).reduce(f64::min)?;
        let beta_max = others().map(|(_, p)| p.speed_limit).reduce(f64::max)?;
        let ds = others()
            .map(|(k, _)| cfg.pair_distance(params, i, k))
            .reduce(f64::max)?;
        Some(Self::new(&params[i], alpha_min, beta_max, ds))
    }
}

/// Indices `j ≠ i` within agent `i`'s neighbor disk (boundary inclusive).
pub fn neighbors(i: usize, states: &[AgentState], info: &NeighborInfo) -> Vec<usize> {
    states
        .iter()
        .enumerate()
        .filter(|(j, s)| *j != i && (states[i].p - s.p).norm() <= info.d_n)
        .map(|(j, _)| j)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn pair(pi: (f64, f64), vi: (f64, f64), pj: (f64, f64), vj: (f64, f64)) -> Vec<AgentState> {
        vec![
            AgentState::new(Vec2::new(pi.0, pi.1), Vec2::new(vi.0, vi.1)),
            AgentState::new(Vec2::new(pj.0, pj.1), Vec2::new(vj.0, vj.1)),
        ]
    }

    fn fixed(ds: f64) -> BarrierConfig {
        BarrierConfig {
            ds_mode: SafetyDistance::Fixed(ds),
            epsilon: 1e-6,
        }
    }

    fn two(alpha_i: f64, alpha_j: f64) -> Vec<AgentParams> {
        vec![
            AgentParams::new(1, alpha_i, 0.6, 1.0, 0.3),
            AgentParams::new(2, alpha_j, 0.6, 1.0, 0.3),
        ]
    }

    #[test]
    fn h_on_boundary_is_zero() {
        let s = pair((0.6, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let rel = relative_state(&s[0], &s[1]).unwrap();
        let v = h_ij(&rel, 2.4, 0.6).unwrap();
        assert_relative_eq!(v.h, 0.0);
        assert!(v.inside_safety_disk);
    }

    #[test]
    fn h_closing_example() {
        let s = pair((1.1, 0.0), (-0.8, 0.0), (0.0, 0.0), (0.0, 0.0));
        let rel = relative_state(&s[0], &s[1]).unwrap();
        let v = h_ij(&rel, 2.4, 0.6).unwrap();
        // sqrt(2 · 2.4 · 0.5) − 0.8
        assert_relative_eq!(v.h, 2.4f64.sqrt() - 0.8, epsilon = 1e-12);
        assert_relative_eq!(v.h, 0.7492, epsilon = 1e-4);
        assert!(!v.inside_safety_disk);
    }

    #[test]
    fn h_receding_on_boundary_is_safe() {
        let s = pair((0.6, 0.0), (0.5, 0.0), (0.0, 0.0), (0.0, 0.0));
        let rel = relative_state(&s[0], &s[1]).unwrap();
        assert_relative_eq!(h_ij(&rel, 2.4, 0.6).unwrap().h, 0.5);
    }

    #[test]
    fn h_rejects_nonpositive_alpha_sum() {
        let s = pair((1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let rel = relative_state(&s[0], &s[1]).unwrap();
        assert!(matches!(
            h_ij(&rel, 0.0, 0.6),
            Err(BarrierError::InvalidParameters(_))
        ));
    }

    #[test]
    fn static_pair_row_admits_zero_control() {
        let s = pair((1.5, 0.2), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let row = centralized_row(0, 1, &s, &two(1.2, 1.2), &fixed(0.6)).unwrap();
        assert!(row.b > 0.0);
        assert!(row.is_satisfied(&[0.0; 4], 0.0));
    }

    #[test]
    fn centralized_row_closing_example() {
        let s = pair((1.1, 0.0), (-0.8, 0.0), (0.0, 0.0), (0.0, 0.0));
        let row = centralized_row(0, 1, &s, &two(1.2, 1.2), &fixed(0.6)).unwrap();
        // Term by term: γh³d − (dvᵀdp)²/d² + ‖dv‖² + A dvᵀdp / sqrt(2A(d − Ds)).
        let h: f64 = 2.4f64.sqrt() - 0.8;
        let expected =
            h.powi(3) * 1.1 - 0.88f64.powi(2) / 1.21 + 0.64 + 2.4 * -0.88 / 2.4f64.sqrt();
        assert_relative_eq!(row.b, expected, epsilon = 1e-12);
        assert_relative_eq!(row.b, -0.9009, epsilon = 2e-3);
        assert_eq!(row.a, vec![-1.1, 0.0, 1.1, 0.0]);
        assert_eq!(row.pair, (0, 1));
    }

    #[test]
    fn common_mode_control_cancels() {
        let s = pair((1.1, 0.4), (-0.8, 0.1), (0.0, 0.0), (0.2, 0.0));
        let row = centralized_row(0, 1, &s, &two(1.2, 0.6), &fixed(0.6)).unwrap();
        assert_relative_eq!(row.lhs(&[0.3, -0.7, 0.3, -0.7]), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn rows_inside_disk_report_pair() {
        let s = pair((0.5, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let err = centralized_row(0, 1, &s, &two(1.2, 1.2), &fixed(0.6)).unwrap_err();
        assert!(matches!(
            err,
            BarrierError::AlreadyViolated { i: 0, j: 1, .. }
        ));
        let err = strategy_c_row(1, 0, &s, &two(1.2, 1.2), 1.2, &fixed(0.6)).unwrap_err();
        assert!(matches!(
            err,
            BarrierError::AlreadyViolated { i: 1, j: 0, .. }
        ));
    }

    #[test]
    fn coincident_rows_are_degenerate() {
        let s = pair((0.0, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let err = strategy_b_row(0, 1, &s, &two(1.2, 1.2), &fixed(0.6)).unwrap_err();
        assert_eq!(err, BarrierError::Degenerate { i: 0, j: 1 });
    }

    #[test]
    fn strategy_a_equal_split() {
        // Static agents: drift terms vanish, leaving d · share · γh³.
        let s = pair((1.4, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let p = two(1.2, 1.2);
        let (ri, rj) = strategy_a_rows(0, 1, &s, &p, &fixed(0.6)).unwrap();
        assert_relative_eq!(ri.b, rj.b, epsilon = 1e-14);
        let rel = relative_state(&s[0], &s[1]).unwrap();
        let h = h_ij(&rel, 2.4, 0.6).unwrap().h;
        assert_relative_eq!(ri.b, 0.5 * h.powi(3) * 1.4, epsilon = 1e-12);
    }

    #[test]
    fn strategy_a_unequal_share() {
        let s = pair((1.4, 0.0), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let p = two(1.2, 0.6);
        let (ri, rj) = strategy_a_rows(0, 1, &s, &p, &fixed(0.6)).unwrap();
        assert_relative_eq!(ri.b / (ri.b + rj.b), 2.0 / 3.0, epsilon = 1e-12);
    }

    #[test]
    fn strategy_b_shares() {
        let s = pair((1.1, 0.0), (-0.8, 0.0), (0.0, 0.0), (0.0, 0.0));
        let p = two(1.2, 0.6);
        let (ri, rj) = strategy_b_rows(0, 1, &s, &p, &fixed(0.6)).unwrap();
        // Ensemble bound for α_i + α_j = 1.8 computed term by term.
        let a: f64 = 1.8;
        let h = (2.0 * a * 0.5).sqrt() - 0.8;
        let b = h.powi(3) * 1.1 - 0.64 + 0.64 + a * -0.88 / (2.0 * a * 0.5).sqrt();
        assert_relative_eq!(ri.b, b * 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!(rj.b, b / 3.0, epsilon = 1e-12);
        assert_relative_eq!(ri.b + rj.b, b, epsilon = 1e-12);
    }

    #[test]
    fn strategy_b_burden_goes_to_agile_agent() {
        let s = pair((1.1, 0.0), (-0.8, 0.0), (0.0, 0.0), (0.0, 0.0));
        let p = two(1.2, 1e-9);
        let (ri, rj) = strategy_b_rows(0, 1, &s, &p, &fixed(0.6)).unwrap();
        assert!(rj.b.abs() < 1e-8 * ri.b.abs());
    }

    #[test]
    fn strategy_c_static_agents() {
        let s = pair((1.4, 0.3), (0.0, 0.0), (0.0, 0.0), (0.0, 0.0));
        let p = two(1.2, 0.6);
        let row = strategy_c_row(0, 1, &s, &p, 0.6, &fixed(0.6)).unwrap();
        let rel = relative_state(&s[0], &s[1]).unwrap();
        let h = h_ij(&rel, 1.8, 0.6).unwrap().h;
        assert_relative_eq!(row.b, (1.2 / 1.8) * h.powi(3) * rel.dist, epsilon = 1e-12);
        assert_eq!(row.a, vec![-1.4, -0.3]);
    }

    #[test]
    fn strategy_c_pair_matches_centralized() {
        let s = pair((1.3, -0.2), (-0.4, 0.25), (0.1, 0.35), (0.3, -0.1));
        let p = two(1.2, 0.6);
        let cfg = fixed(0.6);
        let ri = strategy_c_row(0, 1, &s, &p, 0.6, &cfg).unwrap().embed(0, 2);
        let rj = strategy_c_row(1, 0, &s, &p, 1.2, &cfg).unwrap().embed(1, 2);
        let c = centralized_row(0, 1, &s, &p, &cfg).unwrap();
        let sum = ri.sum(&rj);
        for (x, y) in sum.a.iter().zip(&c.a) {
            assert_relative_eq!(x, y, epsilon = 1e-12);
        }
        assert_relative_eq!(sum.b, c.b, epsilon = 1e-10);
    }

    #[test]
    fn underestimated_neighbor_shrinks_barrier() {
        let s = pair((1.3, -0.2), (-0.4, 0.25), (0.1, 0.35), (0.3, -0.1));
        let rel = relative_state(&s[0], &s[1]).unwrap();
        for est in [0.05, 0.3, 0.59] {
            assert!(h_ij(&rel, 1.2 + est, 0.6).unwrap().h <= h_ij(&rel, 1.8, 0.6).unwrap().h);
        }
    }

    #[test]
    fn neighbor_radius_example() {
        let p = AgentParams::new(1, 1.2, 0.6, 1.0, 0.3);
        let d = neighbor_radius(&p, 0.6, 0.6, 0.6);
        let expected = 0.6 + (3.6f64.cbrt() + 1.2).powi(2) / 3.6;
        assert_relative_eq!(d, expected, epsilon = 1e-12);
        assert_relative_eq!(d, 2.6742, epsilon = 1e-4);
    }

    #[test]
    fn neighbor_radius_limits_and_monotonicity() {
        let p = |gamma: f64, beta: f64| AgentParams::new(1, 1.2, beta, gamma, 0.3);
        let stiff = neighbor_radius(&p(1e12, 0.6), 0.6, 0.6, 0.6);
        assert_relative_eq!(stiff, 0.6 + 1.2f64.powi(2) / 3.6, epsilon = 1e-3);
        let mut last = f64::INFINITY;
        for g in [0.1, 0.5, 1.0, 4.0, 20.0] {
            let d = neighbor_radius(&p(g, 0.6), 0.6, 0.6, 0.6);
            assert!(d < last);
            last = d;
        }
        let mut last = 0.0;
        for b in [0.1, 0.3, 0.6, 1.0] {
            let d = neighbor_radius(&p(1.0, b), 0.6, 0.6, 0.6);
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn neighbor_set_boundaries() {
        let states: Vec<AgentState> = [0.0, 3.0, 5.0]
            .iter()
            .map(|x| AgentState::at_rest(Vec2::new(*x, 0.0)))
            .collect();
        let info = NeighborInfo {
            d_n: 3.0,
            alpha_min: 0.6,
            beta_max: 0.6,
        };
        assert_eq!(neighbors(0, &states, &info), vec![1]);
        let far = NeighborInfo { d_n: 1.0, ..info };
        assert!(neighbors(0, &states, &far).is_empty());
    }

    #[test]
    fn neighbor_disks_can_be_asymmetric() {
        // An agile, aggressive agent has a small disk; a sluggish, gentle one a large disk.
        let params = vec![
            AgentParams::new(1, 2.0, 0.3, 20.0, 0.1),
            AgentParams::new(2, 0.3, 0.6, 0.2, 0.1),
        ];
        let cfg = BarrierConfig::default();
        let di = NeighborInfo::from_team(0, &params, &cfg).unwrap();
        let dj = NeighborInfo::from_team(1, &params, &cfg).unwrap();
        assert!(di.d_n < dj.d_n);
        let gap = 0.5 * (di.d_n + dj.d_n);
        let states = vec![
            AgentState::at_rest(Vec2::zeros()),
            AgentState::at_rest(Vec2::new(gap, 0.0)),
        ];
        assert!(neighbors(0, &states, &di).is_empty());
        assert_eq!(neighbors(1, &states, &dj), vec![0]);
    }

    #[test]
    fn config_validation() {
        assert!(BarrierConfig::default().validate().is_ok());
        assert!(fixed(0.0).validate().is_err());
        let bad = BarrierConfig {
            epsilon: 0.0,
            ..BarrierConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}

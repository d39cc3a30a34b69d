//! Agent state, double-integrator integration and relative-state geometry.
//!
//! The workspace is planar. Positions and velocities are measured with the
//! Euclidean norm, acceleration limits with the infinity norm.

use nalgebra::Vector2;
use thiserror::Error;

pub type Vec2 = Vector2<f64>;

/// Default integration step in seconds.
pub const DEFAULT_DT: f64 = 0.02;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AgentError {
    #[error("agent {id}: {field} must be finite and strictly positive, got {value}")]
    NonPositive {
        id: usize,
        field: &'static str,
        value: f64,
    },
    #[error("coincident positions: relative geometry is undefined")]
    Coincident,
}

/// Static per-agent limits and barrier parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentParams {
    pub id: usize,
    /// Acceleration limit (m/s², infinity norm).
    pub accel_limit: f64,
    /// Speed limit (m/s).
    pub speed_limit: f64,
    /// Barrier aggressiveness, multiplies h³ in the class-K term.
    pub gamma: f64,
    /// Safety radius (m).
    pub radius: f64,
}

impl AgentParams {
    pub fn new(id: usize, accel_limit: f64, speed_limit: f64, gamma: f64, radius: f64) -> Self {
        Self {
            id,
            accel_limit,
            speed_limit,
            gamma,
            radius,
        }
    }

    pub fn validate(&self) -> Result<(), AgentError> {
        for (field, value) in [
            ("alpha", self.accel_limit),
            ("beta", self.speed_limit),
            ("gamma", self.gamma),
            ("radius", self.radius),
        ] {
            if !(value.is_finite() && value > 0.0) {
                return Err(AgentError::NonPositive {
                    id: self.id,
                    field,
                    value,
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentState {
    pub p: Vec2,
    pub v: Vec2,
}

impl AgentState {
    pub fn new(p: Vec2, v: Vec2) -> Self {
        Self { p, v }
    }

    pub fn at_rest(p: Vec2) -> Self {
        Self {
            p,
            v: Vec2::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

/// Commanded acceleration (m/s²).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlInput(pub Vec2);

impl ControlInput {
    pub fn zero() -> Self {
        Self(Vec2::zeros())
    }

    pub fn new(x: f64, y: f64) -> Self {
        Self(Vec2::new(x, y))
    }
}

/// Geometry of agent `i` relative to agent `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelativeState {
    /// p_i − p_j
    pub dp: Vec2,
    /// v_i − v_j
    pub dv: Vec2,
    /// ‖dp‖
    pub dist: f64,
    /// Normal relative velocity dpᵀdv / ‖dp‖; negative when closing.
    pub vbar: f64,
}

impl RelativeState {
    /// dpᵀdv
    pub fn dp_dot_dv(&self) -> f64 {
        self.dp.dot(&self.dv)
    }
}

pub fn relative_state(si: &AgentState, sj: &AgentState) -> Result<RelativeState, AgentError> {
    let dp = si.p - sj.p;
    let dv = si.v - sj.v;
    let dist = dp.norm();
    if dist <= 0.0 {
        return Err(AgentError::Coincident);
    }
    Ok(RelativeState {
        dp,
        dv,
        dist,
        vbar: dp.dot(&dv) / dist,
    })
}

/// Semi-implicit Euler step: velocity first, then position with the new velocity.
pub fn step(s: &AgentState, u: &ControlInput, dt: f64) -> AgentState {
    debug_assert!(dt > 0.0);
    let v = s.v + u.0 * dt;
    let p = s.p + v * dt;
    AgentState { p, v }
}

/// Clamp each component of `u` to `[-alpha, alpha]`.
pub fn saturate_box(u: &ControlInput, alpha: f64) -> ControlInput {
    ControlInput(u.0.map(|c| c.clamp(-alpha, alpha)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn st(px: f64, py: f64, vx: f64, vy: f64) -> AgentState {
        AgentState::new(Vec2::new(px, py), Vec2::new(vx, vy))
    }

    #[test]
    fn relative_state_static_pair() {
        let r = relative_state(&st(1.0, 0.0, 0.0, 0.0), &st(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_eq!(r.dp, Vec2::new(1.0, 0.0));
        assert_eq!(r.dv, Vec2::zeros());
        assert_eq!(r.dist, 1.0);
        assert_eq!(r.vbar, 0.0);
    }

    #[test]
    fn relative_state_closing() {
        let r = relative_state(&st(1.1, 0.0, -0.8, 0.0), &st(0.0, 0.0, 0.0, 0.0)).unwrap();
        assert_relative_eq!(r.dist, 1.1);
        assert_relative_eq!(r.vbar, -0.8);
    }

    #[test]
    fn relative_state_coincident_is_error() {
        let a = st(0.3, 0.3, 1.0, 0.0);
        assert_eq!(relative_state(&a, &a), Err(AgentError::Coincident));
    }

    #[test]
    fn step_examples() {
        let s = st(0.0, 0.0, 0.0, 0.0);
        assert_eq!(step(&s, &ControlInput::zero(), 0.02), s);

        let s = step(&st(0.0, 0.0, 1.0, 0.0), &ControlInput::zero(), 0.1);
        assert_relative_eq!(s.p.x, 0.1);
        assert_eq!(s.v, Vec2::new(1.0, 0.0));

        let s = step(&st(0.0, 0.0, 0.0, 0.0), &ControlInput::new(1.0, 0.0), 0.1);
        assert_relative_eq!(s.v.x, 0.1);
        assert_relative_eq!(s.p.x, 0.01);
    }

    #[test]
    fn saturate_examples() {
        assert_eq!(
            saturate_box(&ControlInput::new(0.5, -0.5), 1.0),
            ControlInput::new(0.5, -0.5)
        );
        assert_eq!(
            saturate_box(&ControlInput::new(2.0, -3.0), 1.0),
            ControlInput::new(1.0, -1.0)
        );
        assert_eq!(
            saturate_box(&ControlInput::new(1.2, 0.6), 1.2),
            ControlInput::new(1.2, 0.6)
        );
    }

    #[test]
    fn params_validation() {
        assert!(AgentParams::new(1, 1.2, 0.6, 1.0, 0.2).validate().is_ok());
        let err = AgentParams::new(3, 1.2, 0.0, 1.0, 0.2)
            .validate()
            .unwrap_err();
        assert!(err.to_string().contains("beta"));
        assert!(AgentParams::new(3, f64::NAN, 0.6, 1.0, 0.2)
            .validate()
            .is_err());
    }

    fn coord() -> impl Strategy<Value = f64> {
        -5.0..5.0f64
    }

    proptest! {
        #[test]
        fn relative_state_antisymmetry(
            a in (coord(), coord(), coord(), coord()),
            b in (coord(), coord(), coord(), coord()),
        ) {
            let si = st(a.0, a.1, a.2, a.3);
            let sj = st(b.0, b.1, b.2, b.3);
            prop_assume!((si.p - sj.p).norm() > 1e-6);
            let ij = relative_state(&si, &sj).unwrap();
            let ji = relative_state(&sj, &si).unwrap();
            prop_assert_eq!(ij.dp, -ji.dp);
            prop_assert_eq!(ij.dv, -ji.dv);
            prop_assert_eq!(ij.dist, ji.dist);
            prop_assert!((ij.vbar - ji.vbar).abs() <= 1e-12 * (1.0 + ij.vbar.abs()));
            prop_assert!((ij.vbar * ij.dist - ij.dp.dot(&ij.dv)).abs() <= 1e-9);
        }

        #[test]
        fn zero_input_conserves_speed(a in (coord(), coord(), coord(), coord()), dt in 1e-3..0.5f64) {
            let s = st(a.0, a.1, a.2, a.3);
            let next = step(&s, &ControlInput::zero(), dt);
            prop_assert_eq!(next.v, s.v);
        }

        #[test]
        fn step_is_deterministic(a in (coord(), coord(), coord(), coord()), ux in -2.0..2.0f64, uy in -2.0..2.0f64) {
            let s = st(a.0, a.1, a.2, a.3);
            let u = ControlInput::new(ux, uy);
            let x = step(&s, &u, 0.02);
            let y = step(&s, &u, 0.02);
            prop_assert_eq!(x.p.x.to_bits(), y.p.x.to_bits());
            prop_assert_eq!(x.v.y.to_bits(), y.v.y.to_bits());
        }

        #[test]
        fn saturation_stays_in_box(ux in -10.0..10.0f64, uy in -10.0..10.0f64, alpha in 0.01..5.0f64) {
            let u = saturate_box(&ControlInput::new(ux, uy), alpha);
            prop_assert!(u.0.amax() <= alpha);
        }
    }
}

//! Online, conservative estimation of neighbors' acceleration limits.
//!
//! Each agent starts from a global lower bound, turns sensed neighbor
//! velocities into an acceleration magnitude by finite differencing, smooths
//! it exponentially, and lets its estimate rise toward that magnitude:
//!
//! ```text
//! d/dt α_ij = k · (max(α_ij, ‖ū_j‖) − α_ij)
//! ```
//!
//! The estimate never decreases and never overtakes the largest observation,
//! so it stays below the neighbor's true limit as long as the observations do.

use crate::agent::Vec2;
use std::collections::BTreeMap;

pub const DEFAULT_SMOOTHING: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeighborEstimate {
    pub alpha: f64,
    pub last_v: Option<Vec2>,
    /// Smoothed observed acceleration magnitude (infinity norm).
    pub u_obs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorState {
    pub estimates: BTreeMap<usize, NeighborEstimate>,
    pub gain: f64,
    pub alpha_floor: f64,
    /// Weight of the newest finite difference in the running average.
    pub smoothing: f64,
    /// Optional hard cap on observed magnitudes.
    pub cap: Option<f64>,
}

impl EstimatorState {
    pub fn init(
        neighbor_ids: impl IntoIterator<Item = usize>,
        alpha_floor: f64,
        gain: f64,
    ) -> Self {
        assert!(alpha_floor > 0.0 && gain > 0.0);
        let mut st = Self {
            estimates: BTreeMap::new(),
            gain,
            alpha_floor,
            smoothing: DEFAULT_SMOOTHING,
            cap: None,
        };
        for j in neighbor_ids {
            st.ensure(j);
        }
        st
    }

    pub fn with_smoothing(mut self, smoothing: f64) -> Self {
        assert!(smoothing > 0.0 && smoothing <= 1.0);
        self.smoothing = smoothing;
        self
    }

    pub fn with_cap(mut self, cap: Option<f64>) -> Self {
        self.cap = cap;
        self
    }

    fn ensure(&mut self, j: usize) -> &mut NeighborEstimate {
        let floor = self.alpha_floor;
        self.estimates.entry(j).or_insert(NeighborEstimate {
            alpha: floor,
            last_v: None,
            u_obs: 0.0,
        })
    }

    /// Current estimate of neighbor `j`'s limit, the floor if `j` is unseen.
    pub fn alpha(&self, j: usize) -> f64 {
        self.estimates.get(&j).map_or(self.alpha_floor, |e| e.alpha)
    }

    /// Feed one sensed velocity of neighbor `j`.
    pub fn observe(&mut self, j: usize, v_observed: Vec2, dt: f64) {
        debug_assert!(dt > 0.0);
        let smoothing = self.smoothing;
        let cap = self.cap;
        let e = self.ensure(j);
        if let Some(last) = e.last_v {
            let mut raw = (v_observed - last).amax() / dt;
            if let Some(c) = cap {
                raw = raw.min(c);
            }
            e.u_obs = (1.0 - smoothing) * e.u_obs + smoothing * raw;
        }
        e.last_v = Some(v_observed);
    }

    /// One Euler step of the estimate dynamics for neighbor `j`.
    ///
    /// The step factor `k·dt` is capped at one so a coarse step cannot carry
    /// the estimate past the observation.
    pub fn update(&mut self, j: usize, dt: f64) {
        debug_assert!(dt > 0.0);
        let factor = (self.gain * dt).min(1.0);
        let e = self.ensure(j);
        let target = e.alpha.max(e.u_obs);
        e.alpha += factor * (target - e.alpha);
    }
}

//! JSON scenario documents.
//!
//! ```json
//! {
//!   "dt": 0.02, "t_end": 60.0, "mode": "decentralized_C",
//!   "gains": {"k1": 1.0, "k2": 2.0},
//!   "barrier": {"ds_mode": "sum_of_radii", "epsilon": 1e-6},
//!   "estimator": {"k": 1.0, "alpha_floor": 0.3},
//!   "seed": 0,
//!   "agents": [{"id": 1, "alpha": 1.2, "beta": 0.6, "gamma": 1.0, "radius": 0.2,
//!               "p0": [0, 0], "v0": [0, 0], "goal": [1, 0]}]
//! }
//! ```
//!
//! Only `agents` is required; `ds_mode` is either `"sum_of_radii"` or
//! `{"fixed": <metres>}`. The optional `neighbors` object pins the neighbor
//! disk bounds (`alpha_min`, `beta_max`) instead of deriving them.

use crate::InputError;
use hetsafe_core::sim::{EstimatorConfig, Gains, NeighborBounds};
use hetsafe_core::{
    AgentParams, AgentSpec, AgentState, BarrierConfig, Mode, SafetyDistance, Scenario, Vec2,
};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_end: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gains: Option<GainsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub barrier: Option<BarrierFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub estimator: Option<EstimatorFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub neighbors: Option<NeighborsFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub agents: Vec<AgentFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainsFile {
    pub k1: f64,
    pub k2: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DsModeFile {
    SumOfRadii,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BarrierFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ds_mode: Option<DsModeFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_floor: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NeighborsFile {
    pub alpha_min: f64,
    pub beta_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentFile {
    pub id: usize,
    pub alpha: f64,
    pub beta: f64,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    pub radius: f64,
    pub p0: [f64; 2],
    #[serde(default)]
    pub v0: [f64; 2],
    pub goal: [f64; 2],
}

fn default_gamma() -> f64 {
    1.0
}

struct Checker(Vec<String>);

impl Checker {
    fn finite(&mut self, key: &str, v: f64) {
        if !v.is_finite() {
            self.0.push(format!("`{key}` must be finite, got {v}"));
        }
    }

    fn positive(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v > 0.0) {
            self.0
                .push(format!("`{key}` must be finite and > 0, got {v}"));
        }
    }

    fn non_negative(&mut self, key: &str, v: f64) {
        if !(v.is_finite() && v >= 0.0) {
            self.0
                .push(format!("`{key}` must be finite and >= 0, got {v}"));
        }
    }
}

impl ScenarioFile {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Schema(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario documents always serialize")
    }

    fn check(&self) -> Result<(), InputError> {
        let mut c = Checker(Vec::new());
        if let Some(dt) = self.dt {
            c.positive("dt", dt);
        }
        if let Some(t) = self.t_end {
            c.non_negative("t_end", t);
        }
        if let Some(g) = &self.gains {
            c.non_negative("gains.k1", g.k1);
            c.non_negative("gains.k2", g.k2);
        }
        if let Some(b) = &self.barrier {
            if let Some(DsModeFile::Fixed(ds)) = b.ds_mode {
                c.positive("barrier.ds_mode.fixed", ds);
            }
            if let Some(e) = b.epsilon {
                c.positive("barrier.epsilon", e);
            }
        }
        if let Some(e) = &self.estimator {
            if let Some(k) = e.k {
                c.positive("estimator.k", k);
            }
            if let Some(a) = e.alpha_floor {
                c.positive("estimator.alpha_floor", a);
            }
            if let Some(s) = e.smoothing {
                c.positive("estimator.smoothing", s);
                if s > 1.0 {
                    c.0.push(format!("`estimator.smoothing` must be <= 1, got {s}"));
                }
            }
            if let Some(cap) = e.cap {
                c.positive("estimator.cap", cap);
            }
        }
        if let Some(n) = &self.neighbors {
            c.positive("neighbors.alpha_min", n.alpha_min);
            c.positive("neighbors.beta_max", n.beta_max);
        }
        if self.agents.is_empty() {
            c.0.push("`agents` must contain at least one agent".into());
        }
        for (k, a) in self.agents.iter().enumerate() {
            c.positive(&format!("agents[{k}].alpha"), a.alpha);
            c.positive(&format!("agents[{k}].beta"), a.beta);
            c.positive(&format!("agents[{k}].gamma"), a.gamma);
            c.positive(&format!("agents[{k}].radius"), a.radius);
            for (name, xy) in [("p0", a.p0), ("v0", a.v0), ("goal", a.goal)] {
                c.finite(&format!("agents[{k}].{name}[0]"), xy[0]);
                c.finite(&format!("agents[{k}].{name}[1]"), xy[1]);
            }
        }
        if let Some(mode) = &self.mode {
            if Mode::parse(mode).is_none() {
                let names: Vec<_> = Mode::ALL.iter().map(|m| m.as_str()).collect();
                c.0.push(format!(
                    "`mode` must be one of {}, got {mode:?}",
                    names.join(", ")
                ));
            }
        }
        match c.0.is_empty() {
            true => Ok(()),
            false => Err(InputError::Schema(c.0.join("; "))),
        }
    }

    /// Validated scenario with defaults filled in.
    pub fn to_scenario(&self) -> Result<Scenario, InputError> {
        self.check()?;
        let agents = self
            .agents
            .iter()
            .map(|a| AgentSpec {
                params: AgentParams::new(a.id, a.alpha, a.beta, a.gamma, a.radius),
                initial: AgentState::new(Vec2::new(a.p0[0], a.p0[1]), Vec2::new(a.v0[0], a.v0[1])),
                goal: Vec2::new(a.goal[0], a.goal[1]),
            })
            .collect();
        let mode = self
            .mode
            .as_deref()
            .and_then(Mode::parse)
            .unwrap_or(Mode::DecentralizedC);
        let mut sc = Scenario::new(agents, mode);
        if let Some(dt) = self.dt {
            sc.dt = dt;
        }
        if let Some(t) = self.t_end {
            sc.t_end = t;
        }
        if let Some(g) = &self.gains {
            sc.gains = Gains { k1: g.k1, k2: g.k2 };
        }
        if let Some(b) = &self.barrier {
            let mut cfg = BarrierConfig::default();
            if let Some(m) = b.ds_mode {
                cfg.ds_mode = match m {
                    DsModeFile::SumOfRadii => SafetyDistance::SumOfRadii,
                    DsModeFile::Fixed(ds) => SafetyDistance::Fixed(ds),
                };
            }
            if let Some(e) = b.epsilon {
                cfg.epsilon = e;
            }
            sc.barrier = cfg;
        }
        if let Some(e) = &self.estimator {
            let d = EstimatorConfig::default();
            sc.estimator = EstimatorConfig {
                gain: e.k.unwrap_or(d.gain),
                alpha_floor: e.alpha_floor.unwrap_or(d.alpha_floor),
                smoothing: e.smoothing.unwrap_or(d.smoothing),
                cap: e.cap,
            };
        }
        if let Some(n) = &self.neighbors {
            sc.neighbor_bounds = NeighborBounds::Fixed {
                alpha_min: n.alpha_min,
                beta_max: n.beta_max,
            };
        }
        if let Some(seed) = self.seed {
            sc.seed = seed;
        }
        sc.validate()
            .map_err(|e| InputError::Invalid(e.to_string()))?;
        Ok(sc)
    }

    /// Document describing an in-memory scenario, every field explicit.
    pub fn from_scenario(sc: &Scenario) -> Self {
        Self {
            dt: Some(sc.dt),
            t_end: Some(sc.t_end),
            mode: Some(sc.mode.as_str().to_string()),
            gains: Some(GainsFile {
                k1: sc.gains.k1,
                k2: sc.gains.k2,
            }),
            barrier: Some(BarrierFile {
                ds_mode: Some(match sc.barrier.ds_mode {
                    SafetyDistance::SumOfRadii => DsModeFile::SumOfRadii,
                    SafetyDistance::Fixed(ds) => DsModeFile::Fixed(ds),
                }),
                epsilon: Some(sc.barrier.epsilon),
            }),
            estimator: Some(EstimatorFile {
                k: Some(sc.estimator.gain),
                alpha_floor: Some(sc.estimator.alpha_floor),
                smoothing: Some(sc.estimator.smoothing),
                cap: sc.estimator.cap,
            }),
            neighbors: match sc.neighbor_bounds {
                NeighborBounds::Derive => None,
                NeighborBounds::Fixed {
                    alpha_min,
                    beta_max,
                } => Some(NeighborsFile {
                    alpha_min,
                    beta_max,
                }),
            },
            seed: Some(sc.seed),
            agents: sc
                .agents
                .iter()
                .map(|a| AgentFile {
                    id: a.params.id,
                    alpha: a.params.accel_limit,
                    beta: a.params.speed_limit,
                    gamma: a.params.gamma,
                    radius: a.params.radius,
                    p0: [a.initial.p.x, a.initial.p.y],
                    v0: [a.initial.v.x, a.initial.v.y],
                    goal: [a.goal.x, a.goal.y],
                })
                .collect(),
        }
    }
}

pub fn parse_scenario_str(text: &str) -> Result<Scenario, InputError> {
    ScenarioFile::from_json(text)?.to_scenario()
}

pub fn parse_scenario(path: &Path) -> Result<Scenario, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| InputError::Io {
        path: path.display().to_string(),
        reason: e.to_string(),
    })?;
    parse_scenario_str(&text)
}

//! Fixed-step scenario engine.
//!
//! Every step all agents read the same state snapshot, compute their nominal
//! goal-seeking control, pass it through the safety filter selected by the
//! scenario mode, and only then integrate.

mod metrics;
pub mod presets;

pub use metrics::{
    compute_metrics, detect_deadlock, lateral_deviation, Deadlock, DeadlockParams, RunMetrics,
};

use crate::agent::{saturate_box, step, AgentParams, AgentState, ControlInput, Vec2};
use crate::barrier::{
    centralized_row_with_gamma, neighbors, pair_h, strategy_a_row, strategy_b_row, strategy_c_row,
    BarrierConfig, BarrierError, HalfspaceRow, NeighborInfo,
};
use crate::estimator::{EstimatorState, DEFAULT_SMOOTHING};
use crate::qp::{QpProblem, QpSolver, QpStatus};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("non-finite state for agent {agent} at t = {t}")]
    NonFinite { agent: usize, t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Centralized,
    DecentralizedA,
    DecentralizedB,
    DecentralizedC,
    DecentralizedCEstimated,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Centralized,
        Mode::DecentralizedA,
        Mode::DecentralizedB,
        Mode::DecentralizedC,
        Mode::DecentralizedCEstimated,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Centralized => "centralized",
            Mode::DecentralizedA => "decentralized_A",
            Mode::DecentralizedB => "decentralized_B",
            Mode::DecentralizedC => "decentralized_C",
            Mode::DecentralizedCEstimated => "decentralized_C_estimated",
        }
    }

    pub fn parse(s: &str) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.as_str() == s)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gains {
    pub k1: f64,
    pub k2: f64,
}

impl Default for Gains {
    fn default() -> Self {
        Self { k1: 1.0, k2: 2.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub gain: f64,
    pub alpha_floor: f64,
    pub smoothing: f64,
    pub cap: Option<f64>,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            gain: 1.0,
            alpha_floor: 0.3,
            smoothing: DEFAULT_SMOOTHING,
            cap: None,
        }
    }
}

/// Where the neighbor-disk bounds `α_min` and `β_max` come from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NeighborBounds {
    /// Minimum/maximum over the other agents' actual parameters.
    Derive,
    Fixed {
        alpha_min: f64,
        beta_max: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentSpec {
    pub params: AgentParams,
    pub initial: AgentState,
    pub goal: Vec2,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub agents: Vec<AgentSpec>,
    pub dt: f64,
    pub t_end: f64,
    pub mode: Mode,
    pub gains: Gains,
    pub barrier: BarrierConfig,
    pub estimator: EstimatorConfig,
    pub neighbor_bounds: NeighborBounds,
    /// Provenance of randomly generated scenarios; the engine itself draws no
    /// random numbers.
    pub seed: u64,
}

impl Scenario {
    pub fn new(agents: Vec<AgentSpec>, mode: Mode) -> Self {
        Self {
            agents,
            dt: crate::agent::DEFAULT_DT,
            t_end: 30.0,
            mode,
            gains: Gains::default(),
            barrier: BarrierConfig::default(),
            estimator: EstimatorConfig::default(),
            neighbor_bounds: NeighborBounds::Derive,
            seed: 0,
        }
    }

    pub fn n_agents(&self) -> usize {
        self.agents.len()
    }

    pub fn params(&self) -> Vec<AgentParams> {
        self.agents.iter().map(|a| a.params).collect()
    }

    pub fn initial_states(&self) -> Vec<AgentState> {
        self.agents.iter().map(|a| a.initial).collect()
    }

    pub fn goals(&self) -> Vec<Vec2> {
        self.agents.iter().map(|a| a.goal).collect()
    }

    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn pair_distance(&self, i: usize, j: usize) -> f64 {
        self.barrier
            .safety_distance(self.agents[i].params.radius, self.agents[j].params.radius)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidScenario(m));
        if self.agents.is_empty() {
            return bad("scenario has no agents".into());
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return bad(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return bad(format!("t_end must be non-negative, got {}", self.t_end));
        }
        for (name, v) in [("k1", self.gains.k1), ("k2", self.gains.k2)] {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("gain {name} must be non-negative, got {v}"));
            }
        }
        self.barrier
            .validate()
            .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
        let est = &self.estimator;
        if !(est.gain.is_finite() && est.gain > 0.0) {
            return bad(format!("estimator gain must be positive, got {}", est.gain));
        }
        if !(est.alpha_floor.is_finite() && est.alpha_floor > 0.0) {
            return bad(format!(
                "estimator alpha_floor must be positive, got {}",
                est.alpha_floor
            ));
        }
        if !(est.smoothing > 0.0 && est.smoothing <= 1.0) {
            return bad(format!(
                "estimator smoothing must lie in (0, 1], got {}",
                est.smoothing
            ));
        }
        if let NeighborBounds::Fixed {
            alpha_min,
            beta_max,
        } = self.neighbor_bounds
        {
            if !(alpha_min > 0.0 && beta_max > 0.0 && alpha_min.is_finite() && beta_max.is_finite())
            {
                return bad("neighbor bounds must be positive".into());
            }
        }
        for (k, a) in self.agents.iter().enumerate() {
            a.params
                .validate()
                .map_err(|e| SimError::InvalidScenario(e.to_string()))?;
            if !a.initial.is_finite() || !a.goal.iter().all(|x| x.is_finite()) {
                return bad(format!(
                    "agent {}: non-finite initial state or goal",
                    a.params.id
                ));
            }
            if a.initial.v.norm() > a.params.speed_limit * (1.0 + 1e-9) {
                return bad(format!(
                    "agent {}: initial speed exceeds speed limit",
                    a.params.id
                ));
            }
            if let Some(dup) = self.agents[..k].iter().find(|b| b.params.id == a.params.id) {
                return bad(format!("duplicate agent id {}", dup.params.id));
            }
        }
        for i in 0..self.n_agents() {
            for j in i + 1..self.n_agents() {
                let dist = (self.agents[i].initial.p - self.agents[j].initial.p).norm();
                let ds = self.pair_distance(i, j);
                if dist <= ds {
                    return bad(format!(
                        "agents {} and {} start {dist:.4} m apart, within safety distance {ds:.4} m",
                        self.agents[i].params.id, self.agents[j].params.id
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Outcome of the safety filter for one agent on one step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterStatus {
    Optimal,
    Infeasible,
    MaxIterations,
    /// A pair was already inside its safety distance, so no rows were built.
    Violated,
}

impl FilterStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterStatus::Optimal => "optimal",
            FilterStatus::Infeasible => "infeasible",
            FilterStatus::MaxIterations => "max_iter",
            FilterStatus::Violated => "violated",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            FilterStatus::Optimal,
            FilterStatus::Infeasible,
            FilterStatus::MaxIterations,
            FilterStatus::Violated,
        ]
        .into_iter()
        .find(|f| f.as_str() == s)
    }

    pub fn used_fallback(self) -> bool {
        !matches!(self, FilterStatus::Optimal)
    }
}

impl From<QpStatus> for FilterStatus {
    fn from(s: QpStatus) -> Self {
        match s {
            QpStatus::Optimal => FilterStatus::Optimal,
            QpStatus::Infeasible => FilterStatus::Infeasible,
            QpStatus::MaxIterations => FilterStatus::MaxIterations,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgentStep {
    pub state: AgentState,
    pub u_applied: ControlInput,
    pub u_nominal: ControlInput,
    pub status: FilterStatus,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairValue {
    pub i: usize,
    pub j: usize,
    /// Barrier value with true parameters; `-inf` for coincident agents.
    pub h: f64,
    pub dist: f64,
}

/// Everything recorded for one step; states are those at time `t`, before
/// the step's controls are integrated.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub t: f64,
    pub agents: Vec<AgentStep>,
    pub pairs: Vec<PairValue>,
    pub min_pair_dist: f64,
    /// `(owner, other)` for every barrier row built this step. Centralized
    /// rows appear as `(i, j)` with `i < j`.
    pub constrained_pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryLog {
    pub records: Vec<StepRecord>,
    pub final_time: f64,
    pub final_states: Vec<AgentState>,
}

/// `û = −k1 (p − r) − k2 v`, saturated to the acceleration box.
pub fn goal_controller(s: &AgentState, goal: &Vec2, k1: f64, k2: f64, alpha: f64) -> ControlInput {
    let u = -(s.p - goal) * k1 - s.v * k2;
    saturate_box(&ControlInput(u), alpha)
}

/// Full deceleration against the current velocity.
pub fn braking_fallback(s: &AgentState, alpha: f64) -> ControlInput {
    let vmax = s.v.amax();
    if vmax == 0.0 {
        return ControlInput::zero();
    }
    saturate_box(&ControlInput(-s.v * (alpha / vmax)), alpha)
}

/// Per-axis next-step velocity box plus a tangent row along the current
/// velocity, which bounds the Euclidean speed.
pub fn speed_rows(agent: usize, s: &AgentState, beta: f64, dt: f64) -> Vec<HalfspaceRow> {
    let tag = (agent, agent);
    let mut rows = vec![
        HalfspaceRow::new(vec![1.0, 0.0], (beta - s.v.x) / dt, tag),
        HalfspaceRow::new(vec![-1.0, 0.0], (beta + s.v.x) / dt, tag),
        HalfspaceRow::new(vec![0.0, 1.0], (beta - s.v.y) / dt, tag),
        HalfspaceRow::new(vec![0.0, -1.0], (beta + s.v.y) / dt, tag),
    ];
    let speed = s.v.norm();
    if speed > 0.0 {
        let n = s.v / speed;
        rows.push(HalfspaceRow::new(vec![n.x, n.y], (beta - speed) / dt, tag));
    }
    rows
}

pub fn pair_values(
    states: &[AgentState],
    params: &[AgentParams],
    cfg: &BarrierConfig,
) -> Vec<PairValue> {
    let n = states.len();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            let dist = (states[i].p - states[j].p).norm();
            let h = pair_h(i, j, states, params, cfg).map_or(f64::NEG_INFINITY, |v| v.h);
            out.push(PairValue { i, j, h, dist });
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct Simulator {
    scenario: Scenario,
    params: Vec<AgentParams>,
    goals: Vec<Vec2>,
    states: Vec<AgentState>,
    neighbor_info: Vec<Option<NeighborInfo>>,
    estimators: Vec<EstimatorState>,
    solver: QpSolver,
    step_index: usize,
}

impl Simulator {
    pub fn new(scenario: Scenario) -> Result<Self, SimError> {
        scenario.validate()?;
        let params = scenario.params();
        let n = params.len();
        let estimated = scenario.mode == Mode::DecentralizedCEstimated;
        let neighbor_info = (0..n)
            .map(|i| neighbor_info_for(i, &scenario, &params, estimated))
            .collect();
        let est = scenario.estimator;
        let estimators = (0..n)
            .map(|i| {
                EstimatorState::init((0..n).filter(|&j| j != i), est.alpha_floor, est.gain)
                    .with_smoothing(est.smoothing)
                    .with_cap(est.cap)
            })
            .collect();
        Ok(Self {
            goals: scenario.goals(),
            states: scenario.initial_states(),
            params,
            neighbor_info,
            estimators,
            solver: QpSolver::default(),
            step_index: 0,
            scenario,
        })
    }

    pub fn scenario(&self) -> &Scenario {
        &self.scenario
    }

    pub fn states(&self) -> &[AgentState] {
        &self.states
    }

    pub fn time(&self) -> f64 {
        self.step_index as f64 * self.scenario.dt
    }

    pub fn neighbor_info(&self, i: usize) -> Option<&NeighborInfo> {
        self.neighbor_info[i].as_ref()
    }

    pub fn estimator(&self, i: usize) -> &EstimatorState {
        &self.estimators[i]
    }

    pub fn step_once(&mut self) -> Result<StepRecord, SimError> {
        let sc = &self.scenario;
        let n = self.states.len();
        let dt = sc.dt;
        let t = self.time();
        if let Some(k) = self.states.iter().position(|s| !s.is_finite()) {
            return Err(SimError::NonFinite { agent: k, t });
        }

        let nominal: Vec<ControlInput> = (0..n)
            .map(|i| {
                goal_controller(
                    &self.states[i],
                    &self.goals[i],
                    sc.gains.k1,
                    sc.gains.k2,
                    self.params[i].accel_limit,
                )
            })
            .collect();

        let mut constrained_pairs = Vec::new();
        let (applied, statuses) = match sc.mode {
            Mode::Centralized => self.filter_centralized(&nominal, &mut constrained_pairs),
            _ => {
                let mut applied = Vec::with_capacity(n);
                let mut statuses = Vec::with_capacity(n);
                for i in 0..n {
                    let (u, st) = self.filter_agent(i, &nominal[i], &mut constrained_pairs);
                    applied.push(u);
                    statuses.push(st);
                }
                (applied, statuses)
            }
        };

        let record = StepRecord {
            t,
            agents: (0..n)
                .map(|i| AgentStep {
                    state: self.states[i],
                    u_applied: applied[i],
                    u_nominal: nominal[i],
                    status: statuses[i],
                })
                .collect(),
            pairs: pair_values(&self.states, &self.params, &sc.barrier),
            min_pair_dist: min_pair_dist(&self.states),
            constrained_pairs,
        };

        let next: Vec<AgentState> = self
            .states
            .iter()
            .zip(&applied)
            .map(|(s, u)| step(s, u, dt))
            .collect();
        if let Some(k) = next.iter().position(|s| !s.is_finite()) {
            return Err(SimError::NonFinite {
                agent: k,
                t: t + dt,
            });
        }
        self.states = next;

        if sc.mode == Mode::DecentralizedCEstimated {
            for i in 0..n {
                for j in (0..n).filter(|&j| j != i) {
                    self.estimators[i].observe(j, self.states[j].v, dt);
                    self.estimators[i].update(j, dt);
                }
            }
        }
        self.step_index += 1;
        Ok(record)
    }

    fn filter_centralized(
        &self,
        nominal: &[ControlInput],
        constrained_pairs: &mut Vec<(usize, usize)>,
    ) -> (Vec<ControlInput>, Vec<FilterStatus>) {
        let sc = &self.scenario;
        let n = self.states.len();
        let gamma = self
            .params
            .iter()
            .map(|p| p.gamma)
            .fold(f64::INFINITY, f64::min);
        let mut rows = Vec::new();
        let mut status = None;
        'pairs: for i in 0..n {
            for j in i + 1..n {
                match centralized_row_with_gamma(
                    i,
                    j,
                    &self.states,
                    &self.params,
                    &sc.barrier,
                    gamma,
                ) {
                    Ok(r) => {
                        rows.push(r);
                        constrained_pairs.push((i, j));
                    }
                    Err(_) => {
                        status = Some(FilterStatus::Violated);
                        break 'pairs;
                    }
                }
            }
        }
        if status.is_none() {
            for i in 0..n {
                let p = &self.params[i];
                rows.extend(
                    speed_rows(i, &self.states[i], p.speed_limit, sc.dt)
                        .iter()
                        .map(|r| r.embed(i, n)),
                );
            }
            let u_hat: Vec<f64> = nominal.iter().flat_map(|u| [u.0.x, u.0.y]).collect();
            let bounds: Vec<f64> = self
                .params
                .iter()
                .flat_map(|p| [p.accel_limit, p.accel_limit])
                .collect();
            let sol = self.solver.solve(&QpProblem::new(u_hat, rows, bounds));
            if sol.status.is_optimal() {
                let u = (0..n)
                    .map(|i| {
                        let c = ControlInput::new(sol.u_star[2 * i], sol.u_star[2 * i + 1]);
                        saturate_box(&c, self.params[i].accel_limit)
                    })
                    .collect();
                return (u, vec![FilterStatus::Optimal; n]);
            }
            status = Some(sol.status.into());
        }
        let st = status.expect("non-optimal branch sets a status");
        let u = (0..n)
            .map(|i| braking_fallback(&self.states[i], self.params[i].accel_limit))
            .collect();
        (u, vec![st; n])
    }

    fn filter_agent(
        &self,
        i: usize,
        nominal: &ControlInput,
        constrained_pairs: &mut Vec<(usize, usize)>,
    ) -> (ControlInput, FilterStatus) {
        let sc = &self.scenario;
        let p = &self.params[i];
        let fallback = || braking_fallback(&self.states[i], p.accel_limit);
        let near = match &self.neighbor_info[i] {
            Some(info) => neighbors(i, &self.states, info),
            None => Vec::new(),
        };
        let mut rows = Vec::with_capacity(near.len() + 5);
        for &j in &near {
            let row: Result<HalfspaceRow, BarrierError> = match sc.mode {
                Mode::DecentralizedA => {
                    strategy_a_row(i, j, &self.states, &self.params, &sc.barrier)
                }
                Mode::DecentralizedB => {
                    strategy_b_row(i, j, &self.states, &self.params, &sc.barrier)
                }
                Mode::DecentralizedC => strategy_c_row(
                    i,
                    j,
                    &self.states,
                    &self.params,
                    self.params[j].accel_limit,
                    &sc.barrier,
                ),
                Mode::DecentralizedCEstimated => strategy_c_row(
                    i,
                    j,
                    &self.states,
                    &self.params,
                    self.estimators[i].alpha(j),
                    &sc.barrier,
                ),
                Mode::Centralized => unreachable!("centralized mode is filtered jointly"),
            };
            match row {
                Ok(r) => {
                    rows.push(r);
                    constrained_pairs.push((i, j));
                }
                Err(_) => return (fallback(), FilterStatus::Violated),
            }
        }
        rows.extend(speed_rows(i, &self.states[i], p.speed_limit, sc.dt));
        let sol = self.solver.solve(&QpProblem::per_agent(
            [nominal.0.x, nominal.0.y],
            rows,
            p.accel_limit,
        ));
        if sol.status.is_optimal() {
            let u = ControlInput::new(sol.u_star[0], sol.u_star[1]);
            (saturate_box(&u, p.accel_limit), FilterStatus::Optimal)
        } else {
            (fallback(), sol.status.into())
        }
    }
}

fn neighbor_info_for(
    i: usize,
    sc: &Scenario,
    params: &[AgentParams],
    estimated: bool,
) -> Option<NeighborInfo> {
    let mut info = NeighborInfo::from_team(i, params, &sc.barrier)?;
    if let NeighborBounds::Fixed {
        alpha_min,
        beta_max,
    } = sc.neighbor_bounds
    {
        info.alpha_min = alpha_min;
        info.beta_max = beta_max;
    }
    if estimated {
        info.alpha_min = sc.estimator.alpha_floor;
    }
    let ds = (0..params.len())
        .filter(|&k| k != i)
        .map(|k| sc.barrier.pair_distance(params, i, k))
        .fold(0.0, f64::max);
    Some(NeighborInfo::new(
        &params[i],
        info.alpha_min,
        info.beta_max,
        ds,
    ))
}

pub fn min_pair_dist(states: &[AgentState]) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            best = best.min((states[i].p - states[j].p).norm());
        }
    }
    best
}

/// Run a scenario to `t_end`, returning the log and its summary metrics.
pub fn run(scenario: &Scenario) -> Result<(TrajectoryLog, RunMetrics), SimError> {
    let mut sim = Simulator::new(scenario.clone())?;
    let steps = scenario.steps();
    let mut records = Vec::with_capacity(steps);
    for _ in 0..steps {
        records.push(sim.step_once()?);
    }
    let log = TrajectoryLog {
        records,
        final_time: sim.time(),
        final_states: sim.states.clone(),
    };
    let metrics = compute_metrics(&log, scenario, &DeadlockParams::default());
    Ok((log, metrics))
}

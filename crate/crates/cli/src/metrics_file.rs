//! `metrics.json`. Keys carry their units.

use hetsafe_core::{RunMetrics, Scenario, TrajectoryLog};
use serde::{Deserialize, Serialize};

/// Runs whose smallest barrier value stays above this count as safe.
pub const SAFE_H_TOL: f64 = -1e-6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsFile {
    pub mode: String,
    pub seed: u64,
    pub dt_s: f64,
    pub steps: usize,
    pub final_time_s: f64,
    pub agent_ids: Vec<usize>,
    /// Absent for single-agent runs.
    pub min_pair_dist_m: Option<f64>,
    pub min_pair_margin_m: Option<f64>,
    pub min_h_m_per_s: Option<f64>,
    pub goal_errors_m: Vec<f64>,
    pub qp_infeasible_count: usize,
    pub deadlock_detected: bool,
    pub deadlock_onset_s: Option<f64>,
    pub deadlock_agent_id: Option<usize>,
    pub path_lengths_m: Vec<f64>,
    pub intervention_m_per_s: Vec<f64>,
    pub max_speeds_m_per_s: Vec<f64>,
    pub safe: bool,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl MetricsFile {
    pub fn new(m: &RunMetrics, log: &TrajectoryLog, sc: &Scenario) -> Self {
        let ids: Vec<usize> = sc.agents.iter().map(|a| a.params.id).collect();
        let multi = sc.n_agents() > 1;
        let min_h = finite(m.min_h);
        Self {
            mode: sc.mode.as_str().to_string(),
            seed: sc.seed,
            dt_s: sc.dt,
            steps: log.records.len(),
            final_time_s: log.final_time,
            min_pair_dist_m: multi.then_some(m.min_pair_dist).and_then(finite),
            min_pair_margin_m: multi.then_some(m.min_pair_margin).and_then(finite),
            min_h_m_per_s: min_h,
            goal_errors_m: m.goal_errors.clone(),
            qp_infeasible_count: m.qp_infeasible_count,
            deadlock_detected: m.deadlock.detected,
            deadlock_onset_s: m.deadlock.onset,
            deadlock_agent_id: m.deadlock.agent.map(|k| ids[k]),
            path_lengths_m: m.path_lengths.clone(),
            intervention_m_per_s: m.intervention.clone(),
            max_speeds_m_per_s: m.max_speeds.clone(),
            safe: !multi || min_h.is_some_and(|h| h >= SAFE_H_TOL),
            agent_ids: ids,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("metrics always serialize")
    }
}

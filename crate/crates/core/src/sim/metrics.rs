use super::{min_pair_dist, pair_values, Scenario, StepRecord, TrajectoryLog};
use crate::agent::{AgentState, Vec2};

/// Summary of one run. Per-agent vectors follow scenario order.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub min_pair_dist: f64,
    /// Smallest `dist_ij − Ds_ij` seen.
    pub min_pair_margin: f64,
    pub min_h: f64,
    pub goal_errors: Vec<f64>,
    /// Agent-steps on which the filter fell back to braking.
    pub qp_infeasible_count: usize,
    pub deadlock: Deadlock,
    pub path_lengths: Vec<f64>,
    /// `Σ ‖u_applied − û‖ · dt` per agent.
    pub intervention: Vec<f64>,
    pub max_speeds: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Deadlock {
    pub detected: bool,
    pub onset: Option<f64>,
    pub agent: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeadlockParams {
    pub window: f64,
    pub speed_eps: f64,
    pub goal_eps: f64,
}

impl Default for DeadlockParams {
    fn default() -> Self {
        Self {
            window: 5.0,
            speed_eps: 0.01,
            goal_eps: 0.05,
        }
    }
}

/// An agent is deadlocked when it stays slower than `speed_eps` for a whole
/// window while more than `goal_eps` from its goal. The earliest such stall
/// is reported.
pub fn detect_deadlock(
    history: &[StepRecord],
    goals: &[Vec2],
    params: &DeadlockParams,
) -> Deadlock {
    assert!(params.window > 0.0);
    let mut best: Option<(f64, usize)> = None;
    let n = goals.len();
    for (k, goal) in goals.iter().enumerate().take(n) {
        let mut start: Option<f64> = None;
        for r in history {
            let s = &r.agents[k].state;
            let stuck = s.v.norm() < params.speed_eps && (s.p - goal).norm() > params.goal_eps;
            if !stuck {
                start = None;
                continue;
            }
            let t0 = *start.get_or_insert(r.t);
            if r.t - t0 >= params.window {
                if best.is_none_or(|(b, _)| t0 < b) {
                    best = Some((t0, k));
                }
                break;
            }
        }
    }
    Deadlock {
        detected: best.is_some(),
        onset: best.map(|b| b.0),
        agent: best.map(|b| b.1),
    }
}

/// Largest distance of an agent's recorded positions from the straight line
/// through its start and goal.
pub fn lateral_deviation(log: &TrajectoryLog, agent: usize, start: Vec2, goal: Vec2) -> f64 {
    let dir = goal - start;
    let len = dir.norm();
    let off = |p: &Vec2| {
        let d = p - start;
        if len == 0.0 {
            d.norm()
        } else {
            (dir.x * d.y - dir.y * d.x).abs() / len
        }
    };
    log.records
        .iter()
        .map(|r| &r.agents[agent].state.p)
        .chain(std::iter::once(&log.final_states[agent].p))
        .map(off)
        .fold(0.0, f64::max)
}

fn margin(states: &[AgentState], scenario: &Scenario) -> f64 {
    let mut best = f64::INFINITY;
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            let d = (states[i].p - states[j].p).norm() - scenario.pair_distance(i, j);
            best = best.min(d);
        }
    }
    best
}

pub fn compute_metrics(
    log: &TrajectoryLog,
    scenario: &Scenario,
    dl: &DeadlockParams,
) -> RunMetrics {
    let params = scenario.params();
    let goals = scenario.goals();
    let n = scenario.n_agents();
    let dt = scenario.dt;

    let snapshots = log
        .records
        .iter()
        .map(|r| r.agents.iter().map(|a| a.state).collect::<Vec<_>>())
        .chain(std::iter::once(log.final_states.clone()));

    let mut min_dist = f64::INFINITY;
    let mut min_margin = f64::INFINITY;
    let mut min_h = f64::INFINITY;
    let mut max_speeds = vec![0.0f64; n];
    for states in snapshots {
        min_dist = min_dist.min(min_pair_dist(&states));
        min_margin = min_margin.min(margin(&states, scenario));
        for pv in pair_values(&states, &params, &scenario.barrier) {
            min_h = min_h.min(pv.h);
        }
        for (m, s) in max_speeds.iter_mut().zip(&states) {
            *m = m.max(s.v.norm());
        }
    }

    let mut path_lengths = vec![0.0; n];
    let mut intervention = vec![0.0; n];
    let mut infeasible = 0;
    for (k, r) in log.records.iter().enumerate() {
        let next = |i: usize| {
            log.records
                .get(k + 1)
                .map_or(log.final_states[i].p, |nr| nr.agents[i].state.p)
        };
        for (i, a) in r.agents.iter().enumerate() {
            path_lengths[i] += (next(i) - a.state.p).norm();
            intervention[i] += (a.u_applied.0 - a.u_nominal.0).norm() * dt;
            if a.status.used_fallback() {
                infeasible += 1;
            }
        }
    }

    RunMetrics {
        min_pair_dist: if n < 2 { f64::INFINITY } else { min_dist },
        min_pair_margin: min_margin,
        min_h,
        goal_errors: log
            .final_states
            .iter()
            .zip(&goals)
            .map(|(s, g)| (s.p - g).norm())
            .collect(),
        qp_infeasible_count: infeasible,
        deadlock: detect_deadlock(&log.records, &goals, dl),
        path_lengths,
        intervention,
        max_speeds,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agent::ControlInput;
    use crate::sim::{AgentStep, FilterStatus};

    fn history(traj: &[(f64, Vec2, Vec2)]) -> Vec<StepRecord> {
        traj.iter()
            .map(|&(t, p, v)| StepRecord {
                t,
                agents: vec![AgentStep {
                    state: AgentState::new(p, v),
                    u_applied: ControlInput::zero(),
                    u_nominal: ControlInput::zero(),
                    status: FilterStatus::Optimal,
                }],
                pairs: vec![],
                min_pair_dist: f64::INFINITY,
                constrained_pairs: vec![],
            })
            .collect()
    }

    fn ticks(n: usize, f: impl Fn(f64) -> (Vec2, Vec2)) -> Vec<(f64, Vec2, Vec2)> {
        (0..n)
            .map(|k| {
                let t = k as f64 * 0.1;
                let (p, v) = f(t);
                (t, p, v)
            })
            .collect()
    }

    #[test]
    fn at_goal_is_not_deadlock() {
        let h = history(&ticks(100, |_| (Vec2::new(1.0, 1.0), Vec2::zeros())));
        let d = detect_deadlock(&h, &[Vec2::new(1.0, 1.0)], &DeadlockParams::default());
        assert!(!d.detected);
    }

    #[test]
    fn parked_away_from_goal_is_deadlock() {
        let h = history(&ticks(100, |t| {
            if t < 2.0 {
                (Vec2::new(t, 0.0), Vec2::new(1.0, 0.0))
            } else {
                (Vec2::new(2.0, 0.0), Vec2::zeros())
            }
        }));
        let d = detect_deadlock(&h, &[Vec2::new(5.0, 0.0)], &DeadlockParams::default());
        assert!(d.detected);
        assert!((d.onset.unwrap() - 2.0).abs() < 0.11);
        assert_eq!(d.agent, Some(0));
    }

    #[test]
    fn slow_but_moving_is_not_deadlock() {
        let h = history(&ticks(100, |t| {
            (Vec2::new(0.02 * t, 0.0), Vec2::new(0.02, 0.0))
        }));
        let d = detect_deadlock(&h, &[Vec2::new(5.0, 0.0)], &DeadlockParams::default());
        assert!(!d.detected);
    }

    #[test]
    fn stall_shorter_than_window_is_ignored() {
        let h = history(&ticks(100, |t| {
            let v = if (3.0..6.0).contains(&t) { 0.0 } else { 0.5 };
            (Vec2::new(t, 0.0), Vec2::new(v, 0.0))
        }));
        assert!(!detect_deadlock(&h, &[Vec2::new(50.0, 0.0)], &DeadlockParams::default()).detected);
    }
}

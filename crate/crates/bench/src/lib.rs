//! Fixtures shared by the benchmarks.

use hetsafe_core::barrier::{centralized_row, neighbors, strategy_c_row};
use hetsafe_core::sim::{presets, speed_rows, Scenario};
use hetsafe_core::{QpProblem, Simulator};

/// Index of the step at which the circle6 team is most tightly packed.
pub const CROWDED_STEP: usize = 200;

/// The circle6 simulator advanced to [`CROWDED_STEP`].
pub fn crowded_circle6() -> Simulator {
    let mut sim = Simulator::new(presets::circle6()).expect("preset is valid");
    for _ in 0..CROWDED_STEP {
        sim.step_once().expect("preset runs");
    }
    sim
}

/// Agent 0's decentralized strategy-C problem at the crowded snapshot.
pub fn per_agent_problem(sim: &Simulator) -> QpProblem {
    let sc = sim.scenario();
    let params = sc.params();
    let states = sim.states();
    let near = neighbors(0, states, sim.neighbor_info(0).expect("team has neighbors"));
    let mut rows: Vec<_> = near
        .iter()
        .map(|&j| {
            strategy_c_row(0, j, states, &params, params[j].accel_limit, &sc.barrier).unwrap()
        })
        .collect();
    rows.extend(speed_rows(0, &states[0], params[0].speed_limit, sc.dt));
    QpProblem::per_agent([-params[0].accel_limit, 0.0], rows, params[0].accel_limit)
}

/// The joint twelve-variable problem over every pair at the same snapshot.
pub fn ensemble_problem(sim: &Simulator) -> QpProblem {
    let sc: &Scenario = sim.scenario();
    let params = sc.params();
    let states = sim.states();
    let n = states.len();
    let mut rows = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            rows.push(centralized_row(i, j, states, &params, &sc.barrier).unwrap());
        }
    }
    let u_hat = (0..n).flat_map(|i| [-params[i].accel_limit, 0.0]).collect();
    let bounds = params.iter().flat_map(|p| [p.accel_limit; 2]).collect();
    QpProblem::new(u_hat, rows, bounds)
}

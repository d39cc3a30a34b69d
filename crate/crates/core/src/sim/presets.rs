//! Built-in scenarios.

use super::{AgentSpec, Mode, Scenario};
use crate::agent::{AgentParams, AgentState, Vec2};
use std::f64::consts::PI;

pub const PRESET_NAMES: [&str; 3] = ["circle6", "rect4", "headon2"];

pub fn by_name(name: &str) -> Option<Scenario> {
    match name {
        "circle6" => Some(circle6()),
        "rect4" => Some(rect4()),
        "headon2" => Some(headon2(1.0, 1.0)),
        _ => None,
    }
}

fn at_rest(params: AgentParams, p: Vec2, goal: Vec2) -> AgentSpec {
    AgentSpec {
        params,
        initial: AgentState::at_rest(p),
        goal,
    }
}

/// Six agents on a circle swapping with their antipodes: five small agile
/// agents and one large sluggish agent, all limited to 0.6 m/s.
///
/// Goals sit a few degrees past the exact antipode so the team is not mirror
/// symmetric; a perfectly symmetric start stalls two agents head-on on the
/// symmetry axis.
pub fn circle6() -> Scenario {
    const RADIUS: f64 = 2.0;
    const SKEW: f64 = 6.0 * PI / 180.0;
    let agents = (0..6)
        .map(|k| {
            let theta = k as f64 * PI / 3.0;
            let (alpha, radius) = if k == 0 { (0.6, 0.4) } else { (1.2, 0.2) };
            let params = AgentParams::new(k + 1, alpha, 0.6, 1.0, radius);
            let p = Vec2::new(theta.cos(), theta.sin()) * RADIUS;
            let g = theta + PI + SKEW;
            at_rest(params, p, Vec2::new(g.cos(), g.sin()) * RADIUS)
        })
        .collect();
    let mut sc = Scenario::new(agents, Mode::DecentralizedC);
    sc.t_end = 60.0;
    sc
}

/// Three agile agents (α = 2.0 m/s², 13 cm diameter) and one cumbersome agent
/// (α = 0.5 m/s², 41 cm diameter) swapping corners of a rectangle along its
/// diagonals.
pub fn rect4() -> Scenario {
    const HALF_W: f64 = 1.6;
    const HALF_H: f64 = 1.0;
    let corners = [
        Vec2::new(-HALF_W, -HALF_H),
        Vec2::new(HALF_W, -HALF_H),
        Vec2::new(HALF_W, HALF_H),
        Vec2::new(-HALF_W, HALF_H),
    ];
    let agents = (0..4)
        .map(|k| {
            let params = if k == 0 {
                AgentParams::new(1, 0.5, 0.4, 1.0, 0.205)
            } else {
                AgentParams::new(k + 1, 2.0, 0.4, 1.0, 0.065)
            };
            at_rest(params, corners[k], corners[(k + 2) % 4])
        })
        .collect();
    let mut sc = Scenario::new(agents, Mode::DecentralizedC);
    sc.t_end = 40.0;
    sc
}

/// Two identical agents crossing head-on with a small lateral offset; the
/// left agent starts at negative x.
pub fn headon2(gamma_left: f64, gamma_right: f64) -> Scenario {
    const HALF: f64 = 2.0;
    const OFFSET: f64 = 0.05;
    let left = AgentParams::new(1, 1.0, 0.6, gamma_left, 0.2);
    let right = AgentParams::new(2, 1.0, 0.6, gamma_right, 0.2);
    let agents = vec![
        at_rest(left, Vec2::new(-HALF, -OFFSET), Vec2::new(HALF, -OFFSET)),
        at_rest(right, Vec2::new(HALF, OFFSET), Vec2::new(-HALF, OFFSET)),
    ];
    let mut sc = Scenario::new(agents, Mode::DecentralizedC);
    sc.t_end = 30.0;
    sc
}

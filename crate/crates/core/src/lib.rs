//! Heterogeneous safety barrier certificates for planar teams of
//! double-integrator agents.
//!
//! * [`agent`]: state types and integration.
//! * [`barrier`]: barrier values and centralized/decentralized safety rows.
//! * [`qp`]: the minimally invasive projection filter.
//! * [`estimator`]: conservative online estimates of neighbors' limits.
//! * [`sim`]: the fixed-step scenario engine, metrics and presets.

pub mod agent;
pub mod barrier;
pub mod estimator;
pub mod qp;
pub mod sim;

pub use agent::{
    relative_state, saturate_box, step, AgentError, AgentParams, AgentState, ControlInput,
    RelativeState, Vec2,
};
pub use barrier::{BarrierConfig, BarrierError, HalfspaceRow, NeighborInfo, SafetyDistance};
pub use estimator::EstimatorState;
pub use qp::{solve, QpProblem, QpSolution, QpStatus};
pub use sim::{
    run, AgentSpec, FilterStatus, Mode, RunMetrics, Scenario, SimError, Simulator, StepRecord,
    TrajectoryLog,
};

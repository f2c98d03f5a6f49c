//! Shared domain types: agent state, flock snapshots, and model parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec::VecM;

/// Which control law drives the flock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Alignment from neighbors' current velocities only.
    Reactive,
    /// Future direction-aware: alignment blends current velocities with
    /// short-horizon predictions of where neighbors are heading.
    Fda,
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Model::Reactive => write!(f, "reactive"),
            Model::Fda => write!(f, "fda"),
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reactive" => Ok(Model::Reactive),
            "fda" => Ok(Model::Fda),
            other => Err(Error::InvalidArgument(format!(
                "unknown model `{other}` (expected `reactive` or `fda`)"
            ))),
        }
    }
}

/// Position, velocity, and applied control of one agent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AgentState {
    pub position: VecM,
    pub velocity: VecM,
    pub control: VecM,
}

impl AgentState {
    pub fn at_rest(position: VecM) -> Self {
        let m = position.dim();
        AgentState {
            position,
            velocity: VecM::zeros(m),
            control: VecM::zeros(m),
        }
    }
}

/// Snapshot of the whole flock at one step.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlockState {
    /// Step index; `time = step * dt`.
    pub step: u64,
    pub time: f64,
    pub agents: Vec<AgentState>,
}

impl FlockState {
    pub fn positions(&self) -> Vec<VecM> {
        self.agents.iter().map(|a| a.position.clone()).collect()
    }
}

/// All model constants for one simulation.
///
/// Values are homogeneous across agents; heterogeneous per-agent parameters
/// are out of scope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlockParams {
    /// Number of agents.
    pub n: usize,
    /// Ambient dimension.
    pub m: usize,
    /// Integration step (s).
    pub dt: f64,
    /// Total simulated time (s).
    pub t_final: f64,
    /// Interaction radius (m).
    pub r: f64,
    /// Spatial offset delta; equilibrium spacing is delta * |N_i| (m).
    pub delta: f64,
    /// Blend between reactive (0) and fully anticipatory (1) alignment.
    pub theta: f64,
    /// Prediction horizon (s).
    pub t_ph: f64,
    /// Perception delay (s); must be an integer multiple of dt.
    pub tau: f64,
    /// Speed bound (m/s).
    pub v_max: f64,
    /// Control magnitude bound (m/s^2).
    pub u_max: f64,
    pub model: Model,
}

impl Default for FlockParams {
    /// The shipped baseline scenario: 10 agents in 3D, 25 s at 20 ms steps,
    /// 1 s prediction horizon, 0.4 s delay, bounds 4 m/s and 8 m/s^2.
    fn default() -> Self {
        FlockParams {
            n: 10,
            m: 3,
            dt: 0.02,
            t_final: 25.0,
            r: 7.5,
            delta: 1.0,
            theta: 0.8,
            t_ph: 1.0,
            tau: 0.4,
            v_max: 4.0,
            u_max: 8.0,
            model: Model::Fda,
        }
    }
}

impl FlockParams {
    // Negated comparisons so NaN fails every bound check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::invalid_config("n", format!("{} is below the minimum of 2 agents", self.n)));
        }
        if self.m < 1 {
            return Err(Error::invalid_config("m", "dimension must be at least 1"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::invalid_config("dt", format!("{} must be positive and finite", self.dt)));
        }
        if !(self.t_final >= 0.0) || !self.t_final.is_finite() {
            return Err(Error::invalid_config("t_final", format!("{} must be nonnegative and finite", self.t_final)));
        }
        if !(self.r > 0.0) {
            return Err(Error::invalid_config("r", format!("{} must be positive", self.r)));
        }
        if !(self.delta >= 0.0) {
            return Err(Error::invalid_config("delta", format!("{} must be nonnegative", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.theta) {
            return Err(Error::invalid_config("theta", format!("{} is outside [0, 1]", self.theta)));
        }
        if !(self.t_ph >= 0.0) {
            return Err(Error::invalid_config("t_ph", format!("{} must be nonnegative", self.t_ph)));
        }
        if !(self.tau >= 0.0) {
            return Err(Error::invalid_config("tau", format!("{} must be nonnegative", self.tau)));
        }
        if !(self.v_max > 0.0) {
            return Err(Error::invalid_config("v_max", format!("{} must be positive", self.v_max)));
        }
        if !(self.u_max > 0.0) {
            return Err(Error::invalid_config("u_max", format!("{} must be positive", self.u_max)));
        }
        let ratio = self.tau / self.dt;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::invalid_config(
                "tau",
                format!("{} is not an integer multiple of dt = {}", self.tau, self.dt),
            ));
        }
        Ok(())
    }

    /// Perception delay expressed in whole steps.
    pub fn lag_steps(&self) -> usize {
        (self.tau / self.dt).round() as usize
    }

    /// Number of integration steps in a full run.
    pub fn total_steps(&self) -> u64 {
        (self.t_final / self.dt).round() as u64
    }
}

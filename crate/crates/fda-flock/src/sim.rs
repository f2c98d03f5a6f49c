//! Initialization, the fixed-step integrator, and the end-to-end runner.
//!
//! The stepping scheme is pinned for reproducibility: all controls are
//! computed from the same snapshot (synchronous update), then each agent
//! integrates `v <- sat(v + dt*u, v_max)` followed by `p <- p + dt*v` with
//! the already-updated velocity. Velocity saturation after every update
//! makes the speed bound an exact trajectory invariant.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::controller;
use crate::error::{Error, Result};
use crate::interaction::{self, DIST_FLOOR};
use crate::metrics::{self, IsolatedAgents, MetricsSample};
use crate::perception::{HistoryBuffer, Perturbation};
use crate::rng::{tag, KeyedStream};
use crate::state::{AgentState, FlockParams, FlockState};
use crate::vec::VecM;

/// Initial condition sampling: positions uniform per axis, velocities
/// isotropic Gaussian (then saturated), controls zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InitConfig {
    pub pos_low: f64,
    pub pos_high: f64,
    pub vel_std: f64,
}

impl Default for InitConfig {
    fn default() -> Self {
        InitConfig {
            pos_low: 0.0,
            pos_high: 10.0,
            vel_std: 1.0,
        }
    }
}

/// Everything a run needs. `Default` is the shipped baseline scenario under
/// nominal perception.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub params: FlockParams,
    pub perturbation: Perturbation,
    pub init: InitConfig,
    pub seed: u64,
    pub record_every: usize,
    pub gamma_isolated: IsolatedAgents,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            params: FlockParams::default(),
            perturbation: Perturbation::Nominal,
            init: InitConfig::default(),
            seed: 42,
            record_every: 1,
            gamma_isolated: IsolatedAgents::Exclude,
        }
    }
}

impl ScenarioConfig {
    // Negated comparisons so NaN fails every bound check.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if !(self.init.pos_low < self.init.pos_high) {
            return Err(Error::invalid_config(
                "init.pos_low/pos_high",
                format!(
                    "pos_low {} must be strictly below pos_high {}",
                    self.init.pos_low, self.init.pos_high
                ),
            ));
        }
        if !(self.init.vel_std >= 0.0) {
            return Err(Error::invalid_config(
                "init.vel_std",
                format!("{} must be nonnegative", self.init.vel_std),
            ));
        }
        if self.record_every == 0 {
            return Err(Error::invalid_config("record_every", "must be at least 1"));
        }
        if let Perturbation::DelayNoise(schedule) = &self.perturbation {
            schedule.validate(self.params.t_final)?;
        }
        Ok(())
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "status")]
pub enum RunOutcome {
    Completed,
    /// A degeneracy stopped integration; the record holds everything up to
    /// the failing step.
    Aborted { step: u64, message: String },
}

/// Headline quantities of one run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub final_gamma: f64,
    /// First time the alignment reached 0.9, if it did.
    pub time_to_gamma_0_9: Option<f64>,
    /// Full-resolution centroid path length.
    pub s_total: f64,
    /// Smallest pairwise distance seen at any step.
    pub min_distance: f64,
    pub final_components: usize,
    pub steps_completed: u64,
    pub wall_secs: f64,
}

/// A full run: recorded snapshots and metrics at the configured cadence
/// (step 0 and the final step are always recorded), plus the summary.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: ScenarioConfig,
    pub outcome: RunOutcome,
    pub samples: Vec<FlockState>,
    pub metrics: Vec<MetricsSample>,
    pub summary: RunSummary,
}

const MAX_INIT_ATTEMPTS: usize = 64;

/// Sample the initial flock state. Position sets with any pair at or below
/// the distance floor are rejected and resampled (bounded attempts).
pub fn initialize(config: &ScenarioConfig) -> Result<FlockState> {
    let params = &config.params;
    let init = &config.init;
    let mut rng = KeyedStream::from_key(&[config.seed, tag::INIT]);

    let mut positions: Option<Vec<VecM>> = None;
    for _ in 0..MAX_INIT_ATTEMPTS {
        let candidate: Vec<VecM> = (0..params.n)
            .map(|_| {
                VecM::from_components(
                    (0..params.m)
                        .map(|_| rng.next_uniform(init.pos_low, init.pos_high))
                        .collect(),
                )
            })
            .collect();
        let degenerate = (0..params.n).any(|i| {
            ((i + 1)..params.n)
                .any(|j| (&candidate[j] - &candidate[i]).norm() <= DIST_FLOOR)
        });
        if !degenerate {
            positions = Some(candidate);
            break;
        }
    }
    let positions = positions.ok_or(Error::InitializationFailure {
        attempts: MAX_INIT_ATTEMPTS,
    })?;

    let agents = positions
        .into_iter()
        .map(|position| {
            let raw = rng.next_normal_vec(params.m, init.vel_std);
            AgentState {
                position,
                velocity: controller::saturate(&raw, params.v_max),
                control: VecM::zeros(params.m),
            }
        })
        .collect();

    Ok(FlockState {
        step: 0,
        time: 0.0,
        agents,
    })
}

/// Advance the flock one step. The buffer's newest snapshot must be
/// `state`; the new snapshot is pushed before returning.
pub fn step(
    state: &FlockState,
    buffer: &mut HistoryBuffer,
    config: &ScenarioConfig,
) -> Result<FlockState> {
    let params = &config.params;
    debug_assert_eq!(buffer.newest().step, state.step);

    let positions = state.positions();
    let n = state.agents.len();
    let lag = params.lag_steps();

    // Phase 1: every control from the same snapshot.
    let mut commands = Vec::with_capacity(n);
    for i in 0..n {
        let neighbor_set = interaction::neighbors(&positions, i, params.r);
        let views = crate::perception::perceive(
            buffer,
            i,
            &neighbor_set.members,
            &config.perturbation,
            lag,
            config.seed,
        );
        let command = controller::control(params.model, i, &state.agents, &views, params)
            .map_err(|source| Error::AtStep {
                step: state.step,
                time: state.time,
                source: Box::new(source),
            })?;
        commands.push(command);
    }

    // Phase 2: synchronous integration, velocity first, position with the
    // updated velocity.
    let next_step = state.step + 1;
    let agents: Vec<AgentState> = state
        .agents
        .iter()
        .zip(commands)
        .map(|(agent, command)| {
            let control = command.applied;
            let velocity = controller::saturate(
                &(&agent.velocity + &(&control * params.dt)),
                params.v_max,
            );
            let position = &agent.position + &(&velocity * params.dt);
            AgentState {
                position,
                velocity,
                control,
            }
        })
        .collect();

    for (idx, agent) in agents.iter().enumerate() {
        if !(agent.position.is_finite() && agent.velocity.is_finite() && agent.control.is_finite())
        {
            return Err(Error::NonFiniteState {
                agent: idx,
                step: next_step,
            });
        }
    }

    let new_state = FlockState {
        step: next_step,
        time: next_step as f64 * params.dt,
        agents,
    };
    buffer.push(new_state.clone());
    Ok(new_state)
}

/// Run a full scenario from a sampled initial state.
pub fn run(config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    let initial = initialize(config)?;
    run_from(initial, config)
}

/// Run a full scenario from an explicit initial state (step 0).
///
/// Degeneracies abort integration but still return the record accumulated
/// so far, with the failure described in [`RunOutcome::Aborted`].
pub fn run_from(initial: FlockState, config: &ScenarioConfig) -> Result<RunRecord> {
    config.validate()?;
    let start = Instant::now();
    let params = &config.params;
    let total_steps = params.total_steps();

    let mut buffer = HistoryBuffer::with_lag(params.lag_steps());
    buffer.push(initial.clone());

    let mut samples = Vec::new();
    let mut metric_rows = Vec::new();
    let mut s_cum = 0.0;
    let mut min_distance = f64::INFINITY;
    let mut time_to_gamma = None;
    let mut prev_centroid = metrics::centroid(&initial.positions());

    let measure = |state: &FlockState, s_cum: f64| -> MetricsSample {
        let positions = state.positions();
        let sets: Vec<_> = (0..positions.len())
            .map(|i| interaction::neighbors(&positions, i, params.r))
            .collect();
        let (d_min, d_mean, d_max) = metrics::distance_stats(&positions);
        MetricsSample {
            t: state.time,
            gamma: metrics::alignment_gamma_with(&state.agents, &sets, config.gamma_isolated),
            d_min,
            d_mean,
            d_max,
            centroid: metrics::centroid(&positions),
            s_cum,
            components: metrics::interaction_components(&positions, params.r),
        }
    };

    let first = measure(&initial, 0.0);
    min_distance = min_distance.min(first.d_min);
    if first.gamma >= 0.9 {
        time_to_gamma = Some(initial.time);
    }
    let mut last_sample = first.clone();
    samples.push(initial.clone());
    metric_rows.push(first);

    let mut state = initial;
    let mut outcome = RunOutcome::Completed;

    for k in 1..=total_steps {
        state = match step(&state, &mut buffer, config) {
            Ok(next) => next,
            Err(err) => {
                outcome = RunOutcome::Aborted {
                    step: k,
                    message: err.to_string(),
                };
                break;
            }
        };

        let row = measure(&state, {
            let c = metrics::centroid(&state.positions());
            s_cum += (&c - &prev_centroid).norm();
            prev_centroid = c;
            s_cum
        });
        min_distance = min_distance.min(row.d_min);
        if time_to_gamma.is_none() && row.gamma >= 0.9 {
            time_to_gamma = Some(row.t);
        }
        let recorded = k % config.record_every as u64 == 0 || k == total_steps;
        if recorded {
            samples.push(state.clone());
            metric_rows.push(row.clone());
        }
        last_sample = row;
    }

    // An aborted run's last computed row may not have hit a record point.
    if metric_rows.last().map(|r| r.t) != Some(last_sample.t) {
        samples.push(state.clone());
        metric_rows.push(last_sample.clone());
    }

    let summary = RunSummary {
        final_gamma: last_sample.gamma,
        time_to_gamma_0_9: time_to_gamma,
        s_total: s_cum,
        min_distance,
        final_components: last_sample.components,
        steps_completed: state.step,
        wall_secs: start.elapsed().as_secs_f64(),
    };

    Ok(RunRecord {
        config: config.clone(),
        outcome,
        samples,
        metrics: metric_rows,
        summary,
    })
}

//! Deterministic multi-agent flocking with future direction-aware control.
//!
//! Agents follow a double-integrator model with a cohesion-separation force
//! and velocity-consensus alignment, all magnitudes limited by a smooth
//! tanh saturation. The future direction-aware (FDA) controller blends the
//! reactive alignment term with short-horizon predictions of neighbors'
//! velocities, which speeds up consensus and keeps it robust when the
//! neighbors are only observed with delay and noise.
//!
//! The crate is organized around small, pure modules:
//!
//! - [`vec`], [`state`]: dimension-generic vectors and domain types.
//! - [`interaction`]: metric neighborhoods and interaction weights.
//! - [`controller`]: saturation, prediction, and both control laws.
//! - [`perception`]: delay buffer, noise schedules, keyed noise streams.
//! - [`sim`]: initialization, fixed-step integration, scenario runner.
//! - [`metrics`]: alignment, distance statistics, centroid path length.
//! - [`analysis`]: consensus-operator spectra for frozen configurations.
//! - [`config`], [`cli`]: TOML configs and the batch experiment commands.
//!
//! Every run is a pure function of its config and seed: noise is drawn from
//! counter-based streams keyed by (seed, step, observer, neighbor, channel),
//! so reruns and parallel schedules reproduce results bit for bit.
//!
//! See the `examples/` directory for one runnable walkthrough per major
//! capability, and the `fda-flock` binary for the batch CLI.

pub mod analysis;
pub mod cli;
pub mod config;
pub mod controller;
pub mod error;
pub mod interaction;
pub mod metrics;
pub mod perception;
pub mod rng;
pub mod sim;
pub mod state;
pub mod vec;

pub use error::{Error, Result};
pub use state::{AgentState, FlockParams, FlockState, Model};
pub use vec::VecM;

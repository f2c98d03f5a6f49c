//! Crate-wide error type and exit-code mapping.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A pairwise distance fell at or below the degeneracy floor while
    /// evaluating the cohesion-separation weight.
    #[error("pairwise distance {distance:.3e} m is at or below the {floor:.1e} m floor")]
    DistanceBelowFloor { distance: f64, floor: f64 },

    /// Distance-floor violation enriched with the offending pair.
    #[error(
        "agents {observer} and {neighbor} are {distance:.3e} m apart (perceived), below the {floor:.1e} m floor"
    )]
    AgentsTooClose {
        observer: usize,
        neighbor: usize,
        distance: f64,
        floor: f64,
    },

    /// The alignment weight 1/|N_i| is undefined on an empty neighborhood.
    #[error("alignment weight is undefined for an empty neighborhood")]
    EmptyNeighborhood,

    /// A step failed; wraps the underlying cause with simulation time context.
    #[error("step {step} (t = {time:.4} s) failed: {source}")]
    AtStep {
        step: u64,
        time: f64,
        #[source]
        source: Box<Error>,
    },

    /// Initial positions could not be sampled without a near-coincident pair.
    #[error("initialization failed after {attempts} resampling attempts")]
    InitializationFailure { attempts: usize },

    /// A state component became non-finite (diverged) during integration.
    #[error("non-finite state for agent {agent} at step {step}")]
    NonFiniteState { agent: usize, step: u64 },

    /// A configuration field violated its documented bound.
    #[error("config field `{field}`: {message}")]
    InvalidConfig { field: String, message: String },

    /// Config file could not be parsed.
    #[error("failed to parse config: {0}")]
    ConfigParse(String),

    /// The alignment preconditioner I + theta*phi*t_ph*A is numerically singular.
    #[error(
        "preconditioner is numerically singular (smallest singular value {margin:.3e}, condition estimate {condition:.3e})"
    )]
    SingularPreconditioner { margin: f64, condition: f64 },

    /// The dense eigensolver did not converge.
    #[error("eigensolver failed to converge")]
    EigensolverFailure,

    #[error("invalid CLI argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 validation, 2 runtime degeneracy, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. }
            | Error::ConfigParse(_)
            | Error::InvalidArgument(_)
            | Error::EmptyNeighborhood => 1,
            Error::DistanceBelowFloor { .. }
            | Error::AgentsTooClose { .. }
            | Error::AtStep { .. }
            | Error::InitializationFailure { .. }
            | Error::NonFiniteState { .. }
            | Error::SingularPreconditioner { .. }
            | Error::EigensolverFailure => 2,
            Error::Io(_) => 3,
        }
    }

    pub(crate) fn invalid_config(field: &str, message: impl Into<String>) -> Error {
        Error::InvalidConfig {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

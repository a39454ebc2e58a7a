use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of range: {0}")]
    Domain(String),

    #[error("invalid density operator: {0}")]
    InvalidState(String),

    #[error("invalid observable: {0}")]
    InvalidObservable(String),

    #[error("states are operationally equivalent (Bloch separation {separation:e}); no Helstrom axis")]
    DegeneratePair { separation: f64 },

    #[error("threshold denominator {denominator:e} is degenerate")]
    DegenerateThreshold { denominator: f64 },

    #[error("outcome branch has probability {probability:e}; post-measurement state is undefined")]
    ZeroProbabilityBranch { probability: f64 },

    #[error("marginal difference for bit {bit} is not aligned with its observable (residual {residual:e})")]
    Alignment { bit: usize, residual: f64 },

    #[error("step {index}: {reason}")]
    Axis { index: usize, reason: String },

    #[error("no feasible omega found for {receivers} receivers after {halvings} halvings")]
    SearchExhausted { receivers: usize, halvings: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors surfaced by environment construction, dynamics, and oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid environment: {0}")]
    InvalidEnvironment(String),

    #[error("internal coordinate s={0} outside [0,1)")]
    SOutOfRange(f64),

    #[error("window radius {radius} too small for support radius {support}")]
    WindowTooSmall { radius: i64, support: i64 },

    #[error("operation requires a periodic environment")]
    NotPeriodic,

    #[error("exact-rational mode requires rational probabilities: {0}")]
    NonRationalProbabilities(String),

    #[error("step {step} is unrealizable: displacement {displacement:?} has probability 0 at {position:?}")]
    UnrealizableStep {
        step: usize,
        position: Vec<i64>,
        displacement: Vec<i64>,
    },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("configuration error: {0}")]
    Config(String),
}

use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no finite periodization for kernel family {family} in dimension {dim}")]
    NonIntegrableSingularity { family: String, dim: usize },

    #[error("integral diverges for the requested exponents: {reason}")]
    DivergentIntegral { reason: String },

    #[error("non-finite state at t={time}, replica {replica}, step {step}, particle {particle}")]
    NonFiniteState {
        time: f64,
        replica: usize,
        step: u64,
        particle: usize,
    },

    #[error("checkpoint corrupted: {reason}")]
    CorruptCheckpoint { reason: String },

    #[error("grid too coarse: axis `{axis}` has {bins} bins, need at least 4")]
    GridTooCoarse { axis: String, bins: usize },

    #[error("exponential weight overflows float range (exponent {exponent})")]
    WeightOverflow { exponent: f64 },

    #[error("exponent constraint violated: 1/p + 1/q = {sum} > 1")]
    ExponentViolation { sum: f64 },

    #[error("grid mismatch: {reason}")]
    GridMismatch { reason: String },

    #[error("CFL violation: {quantity} * dt = {value} exceeds cell size {limit}")]
    CflViolation {
        quantity: String,
        value: f64,
        limit: f64,
    },

    #[error("term overflow in hierarchy bound at l={l}")]
    Overflow { l: usize },

    #[error("outside the guaranteed regime: 4*L*t*max(F0,F) = {value} >= 1")]
    OutOfRegime { value: f64 },

    #[error("missing data: {0}")]
    MissingData(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

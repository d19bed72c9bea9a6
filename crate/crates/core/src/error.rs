use thiserror::Error;

/// Errors produced by the simulator and the bound calculators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DqsError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid quantum object: {0}")]
    InvalidState(String),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("probability {name} = {value} is outside [0, 1]")]
    InvalidProbability { name: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid bound mode combination: {0}")]
    InvalidModeCombination(String),

    #[error("attack `{attack}` is incompatible with this protocol run: {reason}")]
    IncompatibleAttack { attack: String, reason: String },

    #[error("insufficient {kind} rounds: {detail}")]
    InsufficientRounds { kind: &'static str, detail: String },

    #[error("size limit exceeded: {0}")]
    DimensionLimit(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("transcript parse error on line {line}: {reason}")]
    TranscriptParse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, DqsError>;

use thiserror::Error;

/// Errors shared across the library modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {0} outside supported range 1..=8")]
    QubitCountOutOfRange(usize),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitIndexOutOfRange { index: usize, n_qubits: usize },

    #[error("expected {expected} operators, got {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("dimension mismatch: one operand acts on {left} qubits, the other on {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("parameter {name} = {value} outside {range}")]
    ParameterOutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("conflicting bit constraints on qubit {0}")]
    ConflictingConstraint(usize),

    #[error("measurement branch probability {0:.3e} is below tolerance")]
    ZeroProbabilityBranch(f64),

    #[error("information set is off the path of play")]
    OffPath,

    #[error("profile violates the configured parameter mode for {0}")]
    ModeViolation(&'static str),

    #[error("search grid of {0} points exceeds the supported size")]
    GridTooLarge(usize),

    #[error("numeric invariant violated: {0}")]
    NumericInvariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

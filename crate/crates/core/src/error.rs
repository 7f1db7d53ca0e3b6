//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix of dimension {dim} exceeds the dense cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("matrix is not Hermitian within tolerance: deviation {deviation:.3e} > {tol:.3e}")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("matrix is not unitary within tolerance: deviation {deviation:.3e} > {tol:.3e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("state vector is not normalized: |norm - 1| = {deviation:.3e} > {tol:.3e}")]
    NotNormalized { deviation: f64, tol: f64 },

    #[error("expectation value has imaginary residue {residue:.3e} > {tol:.3e}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("term index {index} out of range for {count} terms")]
    TermIndexOutOfRange { index: usize, count: usize },

    #[error("qubit count {n} outside supported range {min}..={max}")]
    QubitCountOutOfRange { n: usize, min: usize, max: usize },

    #[error("term weights must be strictly positive, got {value}")]
    NonPositiveWeight { value: f64 },

    #[error("word letter {letter} out of range for {count} terms")]
    LetterOutOfRange { letter: usize, count: usize },

    #[error("expansion order {order} exceeds the cap of {cap}")]
    OrderCap { order: usize, cap: usize },

    #[error("word length {len} exceeds the commutator realization cap of {cap}")]
    WordLengthCap { len: usize, cap: usize },

    #[error("invalid protocol parameters: {0}")]
    InvalidParams(String),

    #[error("round context inconsistent: {0}")]
    InconsistentContext(String),

    #[error("candidate count {count} exceeds the per-round tractability guard of {guard}")]
    TractabilityGuard { count: usize, guard: usize },

    #[error("path count {count} exceeds the enumeration guard of {guard}")]
    EnumerationGuard { count: usize, guard: usize },

    #[error(
        "round solve failed: residual {residual:.3e} > {tol:.3e} (round {round}, history [{history}])"
    )]
    SolverResidual {
        round: usize,
        history: String,
        residual: f64,
        tol: f64,
    },

    #[error("closed-form distribution unavailable: {0}")]
    ClosedFormShape(String),

    #[error("too few points for a power-law fit: {usable} usable of {total} (need at least 4)")]
    TooFewFitPoints { usable: usize, total: usize },

    #[error("too few samples: {0} (need at least 2)")]
    TooFewSamples(usize),

    #[error("precision target must lie in (0, 1), got {0}")]
    InvalidEpsilon(f64),

    #[error("normalization factor must satisfy Z >= 1, got {0}")]
    InvalidZ(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: config problems exit 2, solver
    /// failures exit 3, everything else 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParams(_) => 2,
            Error::SolverResidual { .. } => 3,
            _ => 1,
        }
    }
}

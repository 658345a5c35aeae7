use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not Hermitian (defect {defect:.3e})")]
    NotHermitian { defect: f64 },

    #[error("Kraus operators are not trace preserving (defect {defect:.3e})")]
    NotTracePreserving { defect: f64 },

    #[error("matrix is not an isometry (defect {defect:.3e})")]
    NotIsometry { defect: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:.3e})")]
    NotPositive { min_eig: f64 },

    #[error("unknown channel '{0}'")]
    UnknownChannel(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("algebra is not unital on the ambient space (unit covers {covered} of {ambient} dimensions)")]
    NotUnital { covered: usize, ambient: usize },

    #[error("operator span is not closed: {0}")]
    ClosureViolation(String),

    #[error("structure recovery failed after {attempts} attempts: {reason}")]
    DegenerateSample { attempts: usize, reason: String },

    #[error("algebra generation did not converge within {0} rounds")]
    NoConvergence(usize),

    #[error("numerical failure at iteration {iteration}: {reason}")]
    Numerical { iteration: usize, reason: String },

    #[error("solver did not reach tolerance in {iterations} iterations (gap {gap:.3e}, infeasibility {infeas:.3e})")]
    SolverStalled { iterations: usize, gap: f64, infeas: f64 },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

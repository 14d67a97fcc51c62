//! Error type shared by all solver modules.

use thiserror::Error;

/// Everything that can go wrong while building or stepping a problem.
#[derive(Debug, Error)]
pub enum Error {
    /// Fractional order outside the open interval (1, 2).
    #[error("fractional order {0} is outside the open interval (1, 2)")]
    InvalidOrder(f64),

    /// Bad axis description (endpoints, node count, coefficient signs).
    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    /// Bad time discretization.
    #[error("invalid time spec: {0}")]
    InvalidTime(String),

    /// Problem construction violated an invariant (boundary values, exact vs
    /// initial mismatch, ...).
    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    /// Field extents do not match what the operation expects.
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: Vec<usize>,
        got: Vec<usize>,
    },

    /// A solver step produced a NaN or infinity.
    #[error("non-finite value produced in {0}")]
    NonFinite(String),

    /// LU factorization hit a pivot below the singularity threshold.
    #[error("singular matrix in {context}: pivot {pivot:e} at index {index}")]
    Singular {
        context: String,
        index: usize,
        pivot: f64,
    },

    /// Matrix handed to the symmetric eigensolver is not symmetric.
    #[error("matrix is not symmetric: max asymmetry {0:e}")]
    NotSymmetric(f64),

    /// Operation requested on a problem it is not defined for.
    #[error("scheme not admissible: {0}")]
    NotAdmissible(String),

    /// Exact solution required but absent.
    #[error("problem has no exact solution")]
    MissingExact,

    /// Dense oracle assembly beyond its size cap.
    #[error("size cap exceeded: {got} unknowns, cap {cap}")]
    SizeCap { got: usize, cap: usize },

    /// Refined-grid forcing oracle refused: Richardson estimate too large.
    #[error("forcing oracle refused: Richardson estimate {estimate:e} exceeds tolerance {tol:e}")]
    OracleRejected { estimate: f64, tol: f64 },

    /// Power iteration did not settle within its iteration cap.
    #[error("power iteration did not converge within {0} iterations")]
    PowerIterationStalled(usize),

    /// Config file or CLI parameter problem.
    #[error("config error: {0}")]
    Config(String),

    /// A time step failed mid-run.
    #[error("step {step} failed: {source}")]
    StepFailed {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    /// Underlying I/O failure (table output, config reading).
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised by the density-matrix engine and the protocol executor.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("unknown qubit label {0}")]
    UnknownQubit(String),
    #[error("duplicate qubit label {0}")]
    DuplicateQubit(String),
    #[error("control and target of a two-qubit gate must differ")]
    ControlEqualsTarget,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("Kraus set is not trace preserving: |sum K^dag K - I| = {deviation:.3e}")]
    IncompleteKraus { deviation: f64 },
    #[error("cannot trace out every qubit of a register")]
    TraceOutEverything,
    #[error("state is not Hermitian within tolerance: deviation {0:.3e}")]
    NotHermitian(f64),
    #[error("state has negative eigenvalue {0:.3e} beyond tolerance")]
    NegativeEigenvalue(f64),
    #[error("zero-probability measurement branch forced on qubit {0}")]
    ZeroProbabilityBranch(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("protocol recipe error: {0}")]
    Recipe(String),
    #[error("execution error: {0}")]
    Execution(String),
}

/// Errors raised while parsing recipe files or run configurations.
#[derive(Debug, Error)]
pub enum ParseError {
    #[error("{file}:{line}: {msg}")]
    Syntax {
        file: String,
        line: usize,
        msg: String,
    },
    #[error("missing required key `{0}`")]
    MissingKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Errors raised by the threshold fitting routines.
#[derive(Debug, Error)]
pub enum FitError {
    #[error("need more data points than parameters: n_c = {n_c}, n_p = {n_p}")]
    TooFewPoints { n_c: usize, n_p: usize },
    #[error("need at least two distinct lattice sizes")]
    SingleLatticeSize,
    #[error("normal matrix is singular (rank {rank} of {size})")]
    SingularNormalMatrix { rank: usize, size: usize },
    #[error("Gauss-Newton did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("invalid data point: {0}")]
    InvalidData(String),
}

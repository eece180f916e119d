use thiserror::Error;

/// Error type shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// An input violates a documented precondition.
    #[error("invalid input: {0}")]
    Domain(String),

    /// A series did not converge within the term cap.
    #[error("series did not converge after {terms} terms (|x| = {magnitude:.3e})")]
    Convergence { terms: usize, magnitude: f64 },

    /// The requested truncation drops too much of the state.
    #[error("truncation at dim {dim} drops tail norm^2 {tail:.3e} (limit {limit:.1e})")]
    Truncation { dim: usize, tail: f64, limit: f64 },

    /// A construction was called for the wrong K-matrix family.
    #[error("wrong K-matrix family: expected {expected}, got {got}")]
    WrongFamily {
        expected: &'static str,
        got: &'static str,
    },

    /// The numerical null space was empty at the requested tolerance.
    #[error("no eigenvector: smallest residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    NoEigenvector { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("state has zero norm")]
    ZeroNorm,

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

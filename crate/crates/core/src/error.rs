use thiserror::Error;

/// Errors surfaced by the library. Numerical routines that merely *measure*
/// a residual do not error on large residuals; errors are reserved for
/// conditions under which a requested object cannot be built at all.
#[derive(Debug, Error)]
pub enum Error {
    /// Parameter set violates a documented precondition.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// A recurrence coefficient vanished where a nonzero value is required,
    /// so the generated sequence would drop degree at `index`.
    #[error("degree collapse at index {index}: recurrence coefficient vanished")]
    DegreeCollapse { index: usize },

    /// A pivot in a symmetric factorization was not positive.
    #[error("matrix not positive definite: pivot {index} is non-positive")]
    NotPositiveDefinite { index: usize },

    /// A terminating hypergeometric series hit a pole of a lower parameter
    /// before the series terminated.
    #[error("series {name} hit a lower-parameter pole at term {k}")]
    SeriesPole { name: &'static str, k: usize },

    /// Exact-arithmetic division by zero.
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),

    /// An iterative solver exhausted its budget.
    #[error("no convergence: {0}")]
    NonConvergence(String),

    /// The inputs fall outside the regime where the identity being checked
    /// is claimed to hold.
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

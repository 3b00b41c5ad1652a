use thiserror::Error;

/// Errors raised by the quadratic form routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid Hessian matrix: {0}")]
    InvalidHessian(String),
    #[error("degenerate form (det H = 0)")]
    Degenerate,
    #[error("matrix is not invertible over the required ring")]
    NotInvertible,
    #[error("scale factor must be nonzero")]
    ZeroScale,
    #[error("form is not positive definite")]
    NotPositiveDefinite,
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("enumeration budget exceeded: needed {needed}, budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("local density at p = {p} did not stabilize up to exponent {max_exponent}")]
    NotStabilized { p: u64, max_exponent: u32 },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("genus catalog is not certified complete")]
    IncompleteCatalog,
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("matrix is not an isometry of the form")]
    NotIsometry,
    #[error("vector is isotropic (Q(v) = 0)")]
    Isotropic,
    #[error("Clifford elements belong to different algebras")]
    AlgebraMismatch,
}

impl Error {
    /// True for errors that mean "ran out of resources" rather than "no".
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. } | Error::Overflow(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

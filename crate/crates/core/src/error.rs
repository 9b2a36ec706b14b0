use thiserror::Error;

/// Errors raised by the algebraic and geometric kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("group spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("unsupported group spec: {0}")]
    UnsupportedSpec(String),
    #[error("unsupported flag: {0}")]
    UnsupportedFlag(String),
    #[error("matrix is not in the algebra (residual {residual:.3e})")]
    NotInAlgebra { residual: f64 },
    #[error("matrix is not in the group (residual {residual:.3e})")]
    NotInGroup { residual: f64 },
    #[error("logarithm series diverges: |g - I| = {norm:.3e} >= 1")]
    LogDivergence { norm: f64 },
    #[error("element outside the open cell (pivot condition number {condition:.3e})")]
    OutsideOpenCell { condition: f64 },
    #[error("j(gk) = j(g) lambda(k) fails (residual {residual:.3e})")]
    EquivarianceViolation { residual: f64 },
    #[error("invariant-connection condition ({condition}) fails (residual {residual:.3e}): {detail}")]
    ConditionViolation { condition: u8, residual: f64, detail: String },
    #[error("base form does not commute with the linear Levi action (residual {residual:.3e})")]
    CommutationHypothesisFailed { residual: f64 },
    #[error("functions do not sum to one (residual {residual:.3e})")]
    PartitionViolation { residual: f64 },
    #[error("contraction of a degree-0 form")]
    DegreeZero,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("derivative of order {requested} unavailable (have {available})")]
    DerivativeUnavailable { requested: u8, available: u8 },
    #[error("ill-conditioned spectrum: {0}")]
    IllConditionedSpectrum(String),
    #[error("precondition failed: {0}")]
    PreconditionFailed(String),
    #[error("unsupported space: {0}")]
    UnsupportedSpace(String),
    #[error("degree mismatch: monomial has degree {got}, space has dimension {expected}")]
    DegreeMismatch { got: usize, expected: usize },
    #[error("box mismatch: Gr({0},{1}) vs Gr({2},{3})")]
    BoxMismatch(usize, usize, usize, usize),
    #[error("integer overflow in exact arithmetic")]
    Overflow,
    #[error("missing induction data: {0}")]
    MissingInductionData(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

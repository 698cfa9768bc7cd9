use thiserror::Error;

/// Errors raised by the algebraic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("mismatched truncation lengths {0} and {1}")]
    MismatchedTruncation(usize, usize),
    #[error("series completed in opposite directions cannot be combined")]
    MismatchedCompletion,
    #[error("series has no truncation window")]
    MissingWindow,
    #[error("leading coefficient is not a unit")]
    NonUnit,
    #[error("valuation lies above the window start; not enough known coefficients")]
    InsufficientPrecision,
    #[error("expected {expected} exponents, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("expected a homogeneous element of degree 1")]
    NotDegreeOne,
    #[error("element is not homogeneous")]
    Inhomogeneous,
    #[error("genus mismatch: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("term at plane position ({0},{1}) lies outside the allowed region")]
    OutsideRegion(i64, i64),
    #[error("spin^c index k={k} violates |k| <= g-1 for genus {g}")]
    SpincOutOfRange { g: usize, k: i64 },
    #[error("genus {0} is outside the supported range 1..={1}")]
    GenusOutOfRange(usize, usize),
    #[error("element does not lie in the augmentation kernel")]
    NotInAugmentationKernel,
    #[error("division by t-1 left a nonzero remainder")]
    NonzeroRemainder,
    #[error("gluing matrix does not preserve the symplectic form")]
    NotSymplectic,
    #[error("class tokens carry different k: {0} vs {1}")]
    IncompatibleK(i64, i64),
    #[error("series has no symmetric representative within its window")]
    Asymmetric,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("internal invariant failure: {0}")]
    Internal(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Internal(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

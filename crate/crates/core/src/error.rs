use thiserror::Error;

/// Errors produced while parsing, normalizing or analyzing a polynomial.
///
/// Variants split into two classes: input errors (the data violates a
/// documented invariant) and internal failures (`ConsistencyFailure`,
/// `SymmetryViolation`), which mean two independent computations disagreed.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("matrix is singular (determinant 0)")]
    SingularMatrix,
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("expected exactly {expected} terms (n+1), found {found}")]
    WrongTermCount { expected: usize, found: usize },
    #[error("exponent {0:?} appears more than once")]
    DuplicateExponent(Vec<i64>),
    #[error("exponents do not span an n-simplex (det of difference matrix is 0)")]
    DegenerateSimplex,
    #[error("coefficient must be a nonzero rational, got {0:?}")]
    ZeroCoefficient(String),
    #[error("dimension n must be at least 1")]
    ZeroDimension,
    #[error("index {index:?} is outside the index set with moduli {moduli:?}")]
    IndexOutOfRange { index: Vec<u64>, moduli: Vec<u64> },
    #[error("value too large for this operation: {0}")]
    TooLarge(String),
    #[error("unsupported dimension n = {n} (supported: {supported})")]
    UnsupportedDimension { n: usize, supported: &'static str },
    #[error("bad resolution {resolution:?}: expected {n} entries, each at least 2")]
    BadResolution { resolution: Vec<usize>, n: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("conjugation does not preserve the kept cell set: {0}")]
    SymmetryViolation(String),
    #[error("internal consistency failure: {0}")]
    ConsistencyFailure(String),
}

impl Error {
    /// True for failures that indicate a bug rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::ConsistencyFailure(_) | Error::SymmetryViolation(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;

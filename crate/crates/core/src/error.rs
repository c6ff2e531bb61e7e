use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point is not in the upper half-plane (y = {0})")]
    NotInUpperHalfPlane(f64),
    #[error("matrix determinant {0} is not 1")]
    BadDeterminant(f64),
    #[error("identity element has no classification")]
    IdentityElement,
    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),
    #[error("degenerate length {0}")]
    DegenerateLength(f64),
    #[error("commutator trace {0} differs from -2")]
    NotPuncturedTorus(f64),
    #[error("enumeration exceeds element budget ({0} elements)")]
    CacheOverflow(usize),
    #[error("point reduction did not converge within {0} steps")]
    NonConvergence(usize),
    #[error("invalid word: {0}")]
    InvalidWord(String),
    #[error("truncation too small: tail estimate {tail:e} exceeds tolerance {tol:e}")]
    TruncationTooSmall { tail: f64, tol: f64 },
    #[error("kernel cutoff too small: tail bound {tail:e} exceeds tolerance {tol:e}")]
    CutoffTooSmall { tail: f64, tol: f64 },
    #[error("degenerate quadratic differential basis")]
    DegenerateBasis,
    #[error("singular Gram matrix")]
    SingularGram,
    #[error("non-positive distance {0}")]
    NonPositiveDistance(f64),
    #[error("non-positive length {0}")]
    NonPositiveLength(f64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("collar half-width {requested} exceeds embedded collar bound {bound}")]
    CollarTooWide { requested: f64, bound: f64 },
    #[error("finite differences did not converge: estimates {coarse} and {fine}")]
    NonconvergentFd { coarse: f64, fine: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cache file error: {0}")]
    Cache(String),
}

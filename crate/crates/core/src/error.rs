use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("polynomial is not unimodular: constant term {0} is not +-1")]
    NotUnimodularPolynomial(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square with dimension >= 1, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("root finder did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("spectrum is not hyperbolic: an eigenvalue has modulus {0} within the band of 1")]
    NotHyperbolic(f64),
    #[error("splitting is ill-conditioned: residual {0:e} exceeds the limit")]
    IllConditioned(f64),
    #[error("adapted norm needs zero vector excluded")]
    ZeroVector,
    #[error("obstruction functionals require a nonzero frequency")]
    ZeroFrequency,
    #[error("g is not a coboundary: {0}")]
    ObstructionViolated(String),
    #[error("candidate enumeration box holds {count} points, above the cap {cap}")]
    EnumerationOverflow { count: u128, cap: u128 },
    #[error("orbit walk did not leave the support ball after {0} steps")]
    OrbitWalkCap(usize),
    #[error("solution residual {residual:e} exceeds tolerance {tol:e}")]
    ResidualTooLarge { residual: f64, tol: f64 },
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

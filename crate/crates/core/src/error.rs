use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular (pivot {pivot:.3e} below threshold {threshold:.3e})")]
    SingularMatrix { pivot: f64, threshold: f64 },

    #[error("matrix is not Hermitian (relative deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("invalid angle {0} degrees; expected a value in [-90, 90]")]
    InvalidAngle(f64),

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("modeling assumption violated: {0}")]
    AssumptionViolated(String),

    #[error("invalid UQPSK equivalence factor {0}; expected a value in [0, 1]")]
    InvalidXi(f64),

    #[error("invalid noncircularity rate {0}; expected a value in [0, 1)")]
    InvalidRate(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series has zero mean power")]
    ZeroPower,

    #[error("degenerate statistics: {0}")]
    DegenerateStatistics(String),

    #[error("outside the domain of the expression: {0}")]
    DomainError(String),

    #[error("inputs do not match the requested spatial case: {0}")]
    CaseMismatch(String),
}

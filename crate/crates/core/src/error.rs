use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    NotOddPrime(i64),
    #[error("M2 is singular")]
    SingularM2,
    #[error("M2^-1 M1 has a repeated eigenvalue (discriminant vanishes)")]
    RepeatedEigenvalue,
    #[error("input matrix is not symmetric")]
    AsymmetricInput,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("work budget exceeded: {needed} terms requested, budget {budget}")]
    WorkBudgetExceeded { needed: f64, budget: f64 },
    #[error("sum {value} is not within 1e-6 of an integer")]
    NotIntegral { value: f64 },
    #[error("relative standard error {achieved:.3e} above requested {requested:.3e}")]
    InsufficientSamples { achieved: f64, requested: f64 },
    #[error("no chart has Jacobian above threshold near {point:?}")]
    ChartCoverageFailure { point: Vec<f64> },
    #[error("quadrature did not converge: error estimate {estimate:.3e}")]
    QuadratureNotConverged { estimate: f64 },
    #[error("weight support is within {clearance:.3e} of the singular locus")]
    SupportTouchesSingularLocus { clearance: f64 },
    #[error("bump normalisation is degenerate")]
    DegenerateBump,
    #[error("report has no rows")]
    EmptyReport,
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

use crate::model::GradMat;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid regime: {0}")]
    InvalidRegime(String),
    #[error("equal exponents p = q = {0}: strict p < q is required")]
    EqualExponents(f64),
    #[error("shape mismatch: expected {expected:?}, got {got:?}")]
    ShapeMismatch {
        expected: (usize, usize),
        got: (usize, usize),
    },
    #[error("invalid integrand: {0}")]
    InvalidIntegrand(String),
    #[error("polynomial has a nonzero component of odd degree {0}")]
    NotEven(usize),
    #[error("polynomial component of degree {degree} is negative at a sampled point")]
    NegativeComponent { degree: usize, witness: GradMat },
    #[error("polynomial is not convex at a sampled point (min eigenvalue {lambda_min})")]
    NotConvex { lambda_min: f64, witness: GradMat },
    #[error("form vanishes on all sampled directions")]
    DegenerateForm,
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("singular hessian at the given point")]
    SingularHessian,
    #[error("degenerate point: lambda_min = 0")]
    DegeneratePoint,
    #[error("lower ellipticity bound violated: ratio {ratio:e}")]
    NotElliptic { ratio: f64, witness: GradMat },
    #[error("upper growth bound violated: ratio {ratio:e}")]
    GrowthViolation { ratio: f64, witness: GradMat },
    #[error("inadmissible sobolev exponent {0}: lambda must lie in (0,1]")]
    InadmissibleSobolevExponent(f64),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("region outside the domain")]
    RegionOutsideDomain,
    #[error("operation requires a scalar field (N = 1), got N = {0}")]
    ScalarOnly(usize),
    #[error("reverse Hoelder precondition violated on cube centered at {center:?} with half-side {half_side}: ratio {ratio}")]
    PreconditionViolation {
        center: Vec<f64>,
        half_side: f64,
        ratio: f64,
    },
    #[error("too few points: need at least {need}, got {got}")]
    TooFewPoints { need: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

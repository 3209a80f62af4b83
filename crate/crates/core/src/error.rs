use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the numerical pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("evaluation within {eps:.3e} of branch point {point}")]
    EvaluationAtBranchPoint { point: Complex64, eps: f64 },

    #[error("two branch values coincide within tolerance at t = {t}")]
    BranchCollision { t: Complex64 },

    #[error("Newton iteration did not converge after {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("Jacobian is singular to working precision")]
    SingularJacobian,

    #[error("adaptive quadrature failed to reach tolerance {tol:.3e} (estimate {estimate:.3e})")]
    QuadratureFailure { tol: f64, estimate: f64 },

    #[error("A-period Gram system is ill-conditioned (estimate {cond:.3e})")]
    IllConditionedPeriods { cond: f64 },

    #[error("period ratio Im(B0/A0) = {value:.3e} is degenerate")]
    DegeneratePeriodRatio { value: f64 },

    #[error("endpoints {a} and {b} approach within {dist:.3e} (near a phase boundary)")]
    EndpointCollision { a: Complex64, b: Complex64, dist: f64 },

    #[error("continuation stalled at parameter {at} (step fell below {min_step:.3e})")]
    ContinuationStalled { at: Complex64, min_step: f64 },

    #[error("level-set tracer step collapsed below {min_ds:.3e} near {at}")]
    StepCollapse { at: Complex64, min_ds: f64 },

    #[error("embedding decision changes under grid refinement; increase resolution")]
    InconclusiveResolution,

    #[error("no sign change of the boundary indicator inside the bracket [{lo:.6}, {hi:.6}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("no pipeline classified t = {t} for contour pair ({i},{j})")]
    Unclassified { t: Complex64, i: usize, j: usize },

    #[error("requested precision exhausted after {doublings} node doublings")]
    PrecisionExhausted { doublings: usize },

    #[error("Hankel-type minor of degree {degree} is degenerate; the orthogonal polynomial does not exist")]
    DegenerateHankelMinor { degree: usize },

    #[error("polynomial root finding stalled after {iters} iterations")]
    RootFindingStalled { iters: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty coefficient list")]
    EmptyCoefficients,
    #[error("kappa is not positive on the working range (kappa({alpha}) = {value})")]
    KappaNotPositive { alpha: f64, value: f64 },
    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderTooHigh { order: usize, max: usize },
    #[error("rho must be positive, got {0}")]
    NonpositiveRho(f64),
    #[error("no bounded well found for these parameters")]
    NoWellFound,
    #[error("degenerate well: double root near rho = {rho}")]
    DegenerateWell { rho: f64 },
    #[error("no dual cancellation point next to the well")]
    NoDualPoint,
    #[error("quadrature did not converge (error estimate {estimate:e})")]
    QuadratureNotConverged { estimate: f64 },
    #[error("profile cross-check failed: defect {defect:e} above {tolerance:e}")]
    CrossCheckFailed { defect: f64, tolerance: f64 },
    #[error("|V|^2 = {alpha} leaves the model working range [0, {alpha_max}]")]
    ModelRangeExceeded { alpha: f64, alpha_max: f64 },
    #[error("finite-difference stencil reaches the regime boundary (step {step:e}, margin {margin:e})")]
    BoundaryTooClose { step: f64, margin: f64 },
    #[error("Hessian entry ({i},{j}) is below the noise floor (estimate {estimate:e}, value {value:e})")]
    NoiseFloor { i: usize, j: usize, estimate: f64, value: f64 },
    #[error("period derivative vanishes")]
    ZeroPeriodDerivative,
    #[error("ODE integrator failed at x = {x} (step {step:e})")]
    IntegratorFailed { x: f64, step: f64 },
    #[error("spectral parameter |lambda| = {modulus} exceeds the ceiling {ceiling}")]
    LambdaCeiling { modulus: f64, ceiling: f64 },
    #[error("Evans function nearly vanishes on the contour near lambda = {re} + {im}i")]
    RootOnContour { re: f64, im: f64 },
    #[error("expected 4 roots inside the disk, found {count}")]
    DiskCaptureFailed { count: i64 },
    #[error("low-order coefficients of the interpolated determinant do not vanish (residual {residual:e})")]
    SingularityNotSpurious { residual: f64 },
    #[error("Hessian of the action is singular")]
    SingularHessian,
    #[error("not a minimum of the effective potential (second derivative {d2w})")]
    NotAMinimum { d2w: f64 },
    #[error("no solitary wave for this configuration")]
    NoSolitaryWave,
    #[error("vanishing modulus at sample {index}")]
    VanishingModulus { index: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

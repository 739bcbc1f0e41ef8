use thiserror::Error;

/// Errors raised by the EIT library.
///
/// Numeric payloads are stored as `f64` regardless of the scalar type the
/// computation ran in, so the error type stays non-generic.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EitError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("missing parameter `{0}`")]
    MissingParameter(&'static str),

    #[error("division by zero: `{parameter}` is zero ({context})")]
    DivisionByZero {
        parameter: &'static str,
        context: &'static str,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("pole in {what} at {location:e}")]
    Pole { what: &'static str, location: f64 },

    #[error("pole of the susceptibility inside the difference stencil around omega = {omega:e}; use a smaller d_omega")]
    PoleInStencil { omega: f64 },

    #[error("step size underflow at t = {t:e} (h = {h:e}); system too stiff for the explicit integrator")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("integrator bug: state invariant violated at t = {t:e}: {detail}")]
    InvariantViolation { t: f64, detail: String },

    #[error("adaptive quadrature did not converge; worst subinterval [{lo:e}, {hi:e}] with error estimate {error:e}")]
    QuadratureNonConvergence { lo: f64, hi: f64, error: f64 },

    #[error("no physical group-velocity mode: {0}")]
    NoPhysicalMode(String),

    #[error("fixed-point iteration did not converge after {iterations} iterations (residual {residual:e}, last iterate {last_re:e}{last_im:+e}i)")]
    NonConvergence {
        iterations: usize,
        residual: f64,
        last_re: f64,
        last_im: f64,
    },

    #[error("CFL condition violated: c*dt/dz = {courant} > 1")]
    Cfl { courant: f64 },

    #[error("grid too small: {n_cells} cells (need at least {min})")]
    GridTooSmall { n_cells: usize, min: usize },

    #[error("numerical blow-up (NaN or overflow) at step {step}")]
    NumericalBlowup { step: usize },

    #[error("insufficient data: {found} samples, need at least {required}")]
    InsufficientData { found: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, EitError>;

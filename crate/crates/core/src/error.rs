use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("domain error: {what} (got {value})")]
    Domain { what: &'static str, value: f64 },

    #[error("no sign change on bracket [{lo}, {hi}]: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    #[error(
        "multiplicity formula at degree {degree} evaluates to {value}, which is not an integer"
    )]
    Integrality { degree: u32, value: f64 },

    #[error("no radial solution: rho = {rho} must lie in (0, {limit})")]
    NoSolution { rho: f64, limit: f64 },

    /// The shooting map did not cross the target radius exactly once.
    /// `scan` holds `(logit of the centre deficit, second zero or +inf)`.
    #[error("shooting failure at R = {radius}: {reason}")]
    ShootingFailure {
        radius: f64,
        reason: String,
        scan: Vec<(f64, f64)>,
    },

    #[error("integrator failure at t = {t}: {reason}")]
    Integrator { t: f64, reason: &'static str },

    #[error("eigenvalue {index} did not converge: {reason}")]
    ConvergenceFailure { index: usize, reason: String },

    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// A sampled sign condition never changed. `samples` holds `(rho, value)`.
    #[error("no sign change of {what} over the sampled range")]
    NoSignChange {
        what: &'static str,
        samples: Vec<(f64, f64)>,
    },

    #[error(
        "channel gamma = {gamma} is degenerate: boundary value {boundary_value:e} before scaling"
    )]
    ChannelDegenerate { gamma: f64, boundary_value: f64 },

    #[error(
        "channel gamma = {gamma} undercuts the first invariant channel: tau = {tau} < {tau_first}"
    )]
    MonotonicityViolation {
        gamma: f64,
        tau: f64,
        tau_first: f64,
    },

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// Failure inside a caller-supplied radial source.
    #[error("radial source failed: {0}")]
    Source(String),
}

pub type Result<T> = std::result::Result<T, Error>;

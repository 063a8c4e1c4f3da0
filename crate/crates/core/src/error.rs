use thiserror::Error;

use crate::fde::Trajectory;

/// Errors produced by the fractal calculus routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// The requested resolution cannot be realized (too fine for the depth
    /// cap, or too few samples for a stencil).
    #[error("resolution error: {0}")]
    Resolution(String),

    #[error("value {value} lies outside the domain [{lo}, {hi}]")]
    Domain { value: f64, lo: f64, hi: f64 },

    /// The mass ratio never crossed 1 on the supplied alpha grid. The
    /// evaluated `(alpha, ratio)` curve is kept for diagnosis.
    #[error("no crossing of the mass ratio through 1 on the alpha grid")]
    Estimation { curve: Vec<(f64, f64)> },

    /// The state left the finite range during integration. `partial` holds
    /// every sample accepted before the failing step.
    #[error("trajectory blew up at tau = {tau}")]
    BlowUp { tau: f64, partial: Box<Trajectory> },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("precondition failed: {}", failing.join(", "))]
    Precondition { failing: Vec<String> },

    #[error("expression error: {0}")]
    Expr(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

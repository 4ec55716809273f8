use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Errors raised by the analysis and simulation routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A parameter lies outside the domain of the model.
    Domain { what: &'static str, detail: String },
    /// A quadrature or series failed to reach its tolerance. `estimate` is the
    /// best value obtained and `abs_error` its error estimate.
    NonConvergence {
        what: &'static str,
        estimate: f64,
        abs_error: f64,
    },
    /// A principal-value integral does not exist (the singular part does not cancel).
    Divergence { what: &'static str, detail: String },
    /// The bilateral transform is not analytic at the evaluation point. `margin` is
    /// the worst value of the convergence bound, which must stay below 1/2.
    Infeasible { margin: f64 },
    /// The principal-value routes would have to cancel transform values of
    /// size `tilt` down to a probability.
    IllConditioned { tilt: f64 },
}

impl Error {
    pub(crate) fn domain(what: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            what,
            detail: detail.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain { what, detail } => write!(f, "invalid {what}: {detail}"),
            Error::NonConvergence {
                what,
                estimate,
                abs_error,
            } => write!(
                f,
                "{what} did not converge (estimate {estimate:e}, error {abs_error:e})"
            ),
            Error::Divergence { what, detail } => write!(f, "{what} diverges: {detail}"),
            Error::Infeasible { margin } => write!(
                f,
                "reflected-signal transform is not analytic at the coverage point \
                 (bound {:.4} must be below 0.5)",
                0.5 - margin
            ),
            Error::IllConditioned { tilt } => write!(
                f,
                "principal-value inversion is ill-conditioned: |B(s)| = {tilt:e} at the coverage point"
            ),
        }
    }
}

impl core::error::Error for Error {}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature did not reach its tolerance within the panel budget.
    #[error(
        "quadrature did not converge on [{a}, {b}] after {panels} panels (last change {delta:e}, target {target:e})"
    )]
    NonConvergence { a: f64, b: f64, panels: usize, delta: f64, target: f64 },

    /// The requested correlation pair has no analytic catalog entry.
    #[error("pair ({0}) is not in the analytic correlation catalog")]
    NotCataloged(String),

    /// A regime formula was requested for inputs that violate its assumptions.
    #[error("regime precondition violated: {0}")]
    Regime(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

/// Errors produced by the force engine and its inputs.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed or inconsistent input data.
    #[error("input error: {0}")]
    Input(String),

    /// The chosen extrapolation policy cannot be applied (e.g. a divergent tail).
    #[error("extrapolation policy error: {0}")]
    Policy(String),

    /// An iterative solver ran out of budget. Carries the best point found.
    #[error("no convergence after {iterations} iterations: {message}")]
    Convergence {
        message: String,
        iterations: usize,
        best: Vec<f64>,
    },

    /// Quadrature failed to reach the requested tolerance.
    #[error("numerical error: {message} (estimate {estimate:e}, error {abs_error:e}, intervals {intervals})")]
    Numerical {
        message: String,
        estimate: f64,
        abs_error: f64,
        intervals: usize,
    },

    /// A truncated series left a tail larger than allowed.
    #[error("truncation error: tail {tail:e} exceeds {allowed:e} after {terms} terms")]
    Truncation {
        tail: f64,
        allowed: f64,
        terms: usize,
    },

    /// The Matsubara series would need more terms than allowed.
    #[error("about {needed:.0} Matsubara terms needed, limit {limit}; use the zero-temperature integral")]
    TooManyTerms { needed: f64, limit: usize },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    /// Whether the failure comes from the numerics rather than the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Convergence { .. } | Error::Numerical { .. } | Error::Truncation { .. } | Error::TooManyTerms { .. }
        )
    }

    /// Prefixes the message with `ctx`, keeping the variant.
    pub fn context(self, ctx: impl std::fmt::Display) -> Self {
        match self {
            Error::Domain(m) => Error::Domain(format!("{ctx}: {m}")),
            Error::Input(m) => Error::Input(format!("{ctx}: {m}")),
            Error::Policy(m) => Error::Policy(format!("{ctx}: {m}")),
            Error::Io(m) => Error::Io(format!("{ctx}: {m}")),
            Error::Convergence {
                message,
                iterations,
                best,
            } => Error::Convergence {
                message: format!("{ctx}: {message}"),
                iterations,
                best,
            },
            Error::Numerical {
                message,
                estimate,
                abs_error,
                intervals,
            } => Error::Numerical {
                message: format!("{ctx}: {message}"),
                estimate,
                abs_error,
                intervals,
            },
            // The tail carries no free-text field; the context is dropped.
            t @ (Error::Truncation { .. } | Error::TooManyTerms { .. }) => t,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

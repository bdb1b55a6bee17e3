use thiserror::Error;

use crate::estimators::{MethodId, Scenario};

/// Errors produced by the estimation library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// The quantile was requested at probability 0 or 1.
    #[error("quantile is infinite at p = {0}")]
    Infinite(f64),

    /// Reported summary statistics are not ordered as a <= q1 <= m <= q3 <= b.
    #[error("ordering violation: {0}")]
    Ordering(String),

    /// Adaptive quadrature ran out of subdivisions before reaching tolerance.
    #[error("quadrature did not converge: error estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    NoConvergence { estimate: f64, tolerance: f64 },

    /// The requested method does not apply to the scenario.
    #[error("method {method} is not available for scenario {scenario}; allowed: {}", join_methods(.allowed))]
    Dispatch {
        method: MethodId,
        scenario: Scenario,
        allowed: Vec<MethodId>,
    },

    /// A study record supplies a combination of fields that matches no scenario.
    #[error("unsupported field pattern: {0}")]
    UnsupportedPattern(String),

    /// Inconsistent simulation configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(String),

    #[error("i/o error: {0}")]
    Io(String),
}

fn join_methods(methods: &[MethodId]) -> String {
    methods
        .iter()
        .map(|m| m.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter is outside the range the model accepts.
    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    /// The log-price left the representable range of `f64` prices.
    #[error("price became non-finite at step {step} (log-price {log_price})")]
    NonFinitePrice { step: u64, log_price: f64 },

    #[error("polynomial is degenerate: {0}")]
    DegeneratePolynomial(String),

    #[error("fit is underdetermined: {0}")]
    Underdetermined(String),

    #[error("fit failed after {iterations} iterations: {reason}")]
    FitFailed { iterations: usize, reason: String },

    #[error("crossover not identifiable: {0}")]
    NotIdentifiable(String),

    /// Config document errors carry the 1-based line they refer to (0 when
    /// the error is about the document as a whole).
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("{context}: {message}")]
    Io { context: String, message: String },

    #[error("{0}")]
    Format(String),
}

impl Error {
    pub(crate) fn parameter(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(line: usize, message: impl Into<String>) -> Self {
        Error::Config {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(context: impl Into<String>, err: impl std::fmt::Display) -> Self {
        Error::Io {
            context: context.into(),
            message: err.to_string(),
        }
    }

    /// True for errors caused by user input (config or parameters) rather
    /// than by a failing computation.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Parameter { .. } | Error::Config { .. })
    }
}

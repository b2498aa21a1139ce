//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A quantitative admissibility condition failed. `name` is the stable
    /// identifier of the violated inequality, `detail` shows the numbers.
    #[error("condition {name} violated: {detail}")]
    ConditionViolated { name: String, detail: String },

    /// Input data is malformed or inconsistent (configs, tables, CLI args).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An iterative solve (Newton inversion, fixed point) failed to converge.
    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config parse error: {0}")]
    ConfigParse(String),
}

impl Error {
    pub fn condition(name: &str, detail: impl Into<String>) -> Self {
        Error::ConditionViolated {
            name: name.to_string(),
            detail: detail.into(),
        }
    }

    /// Process exit code for the CLI: condition violations exit with 2,
    /// bad input with 3, everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ConditionViolated { .. } => 2,
            Error::InvalidInput(_) | Error::ConfigParse(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated a documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A scenario, plan or LP file could not be understood.
    #[error("parse error in field `{field}`: {message}")]
    Parse { field: String, message: String },

    #[error("index out of range: {0}")]
    Index(String),

    /// Allocation state that the loop cannot continue from.
    #[error("invalid state: {0}")]
    State(String),

    /// The exact solver ran out of budget before finding any tour set.
    #[error("time budget of {budget_s:.3} s exhausted without a feasible solution")]
    Timeout { budget_s: f64 },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn parse(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse { field: field.into(), message: message.into() }
    }

    /// Short machine-readable tag, used by the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parameter(_) => "parameter",
            Error::Parse { .. } => "parse",
            Error::Index(_) => "index",
            Error::State(_) => "state",
            Error::Timeout { .. } => "timeout",
            Error::UnsupportedSize(_) => "unsupported_size",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}

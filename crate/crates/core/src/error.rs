use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the planning library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A scenario field failed validation.
    #[error("scenario field `{field}`: {message}")]
    Scenario {
        field: String,
        message: String,
    },

    /// A scenario or solution document could not be parsed.
    #[error("parse error in {context}: {message}")]
    Parse {
        context: String,
        message: String,
    },

    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn scenario(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Scenario {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use std::io;
use std::path::PathBuf;

use cctv_core::eval::EvalError;
use cctv_core::exposure::ExposureError;
use cctv_core::graph::GraphError;
use cctv_core::localize::LocalizeError;
use cctv_core::router::RouteError;
use thiserror::Error;

/// Everything the CLI and service can fail with.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    /// Syntax error at a known position in a text file.
    #[error("{what}: line {line}, column {column}: {message}")]
    Syntax {
        what: String,
        line: usize,
        column: usize,
        message: String,
    },

    /// Well-formed input with an invalid value; `field` names the offending
    /// member, e.g. `features[2].properties.heading_deg`.
    #[error("{field}: {message}")]
    Invalid { field: String, message: String },

    #[error("unknown node reference `{node}` in way {way}")]
    UnknownNodeRef { way: String, node: String },

    #[error(transparent)]
    Graph(#[from] GraphError),

    #[error(transparent)]
    Exposure(#[from] ExposureError),

    #[error(transparent)]
    Eval(#[from] EvalError),

    #[error(transparent)]
    Localize(#[from] LocalizeError),

    #[error(transparent)]
    Route(#[from] RouteError),

    #[error("config: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn json(what: &str, e: &serde_json::Error) -> Self {
        Error::Syntax {
            what: what.to_string(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 3 when no route exists, 2 for any other input
    /// problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Route(RouteError::NoPath) => 3,
            _ => 2,
        }
    }

    /// Name of the offending field, when the error is about one.
    pub fn field(&self) -> Option<&str> {
        match self {
            Error::Invalid { field, .. } => Some(field),
            Error::Route(RouteError::InvalidRequest { field, .. }) => Some(field),
            _ => None,
        }
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

pub(crate) fn write(path: &std::path::Path, contents: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

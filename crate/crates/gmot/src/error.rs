use std::path::PathBuf;

/// Errors produced by graph loading, embedding, fitting and transport solving.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A text or CSV input could not be parsed.
    #[error("parse error in {path} at line {line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    /// Structurally valid input with an out-of-domain value (negative weight,
    /// zero-node graph, invalid permutation, ...).
    #[error("invalid input: {0}")]
    Domain(String),

    /// Two arguments whose shapes must agree did not.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A numerical routine could not produce a reliable result.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

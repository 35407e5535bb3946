use std::path::PathBuf;

use serde_json::{json, Value};

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    /// Malformed JSON or a key the schema does not know.
    #[error("config line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{field}: {message}")]
    Validation { field: String, message: String },
    #[error("VPL_THREADS: {0}")]
    Threads(String),
    #[error(transparent)]
    Core(#[from] vpl_core::Error),
    #[error(transparent)]
    Pde(#[from] vpl_pde::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::Validation { .. } => "validation",
            Error::Threads(_) => "threads",
            Error::Core(_) => "core",
            Error::Pde(_) => "pde",
            Error::Csv(_) | Error::Json(_) => "output",
        }
    }

    /// The object written to stderr on failure.
    pub fn to_json(&self) -> Value {
        let mut v = json!({ "error": self.kind(), "message": self.to_string() });
        match self {
            Error::Parse { line, column, .. } => {
                v["line"] = json!(line);
                v["column"] = json!(column);
            }
            Error::Validation { field, .. } => v["field"] = json!(field),
            Error::Io { path, .. } => v["path"] = json!(path),
            _ => {}
        }
        v
    }
}

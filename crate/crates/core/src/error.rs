use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid window {0}: window length must be at least 2")]
    InvalidWindow(usize),

    #[error("keyword `{stem}` does not occur in document {doc}")]
    KeywordAbsent { stem: String, doc: String },

    #[error("document has no stems")]
    EmptyDocument,

    #[error("zero vector has no direction")]
    ZeroVector,

    #[error("keyword vectors are parallel (cos = {cosine})")]
    DegeneratePair { cosine: f64 },

    #[error("document vector has no component in the keyword plane")]
    ZeroProjection,

    #[error("query parse error at position {position}: {message}")]
    QueryParse { position: usize, message: String },

    #[error("value out of range: {0}")]
    Range(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{path}:{line}: {message}")]
    Corpus {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unknown document id `{0}`")]
    NotFound(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("malformed CSV: {0}")]
    Csv(String),

    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(e) => Error::Io(e),
            other => Error::Csv(format!("{other:?}")),
        }
    }
}

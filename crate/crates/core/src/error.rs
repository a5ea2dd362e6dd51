use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("input has no header line")]
    MissingHeader,

    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),

    #[error("target column `{0}` not found in header")]
    MissingTarget(String),

    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },

    #[error("variable `{0}` has more than 255 categories")]
    TooManyCategories(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid table: {0}")]
    InvalidTable(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty table: {0}")]
    EmptyTable(&'static str),

    #[error("table has {rows} rows, guard is {limit}")]
    TooLarge { rows: usize, limit: usize },

    #[error("fold {fold}: training split has no rows of class `{class}`")]
    MissingClassInFold { fold: usize, class: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

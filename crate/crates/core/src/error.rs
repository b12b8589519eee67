use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error("{source_name}:{line}: invalid UTF-8")]
    Encoding { source_name: String, line: usize },

    #[error("corpus is empty")]
    EmptyCorpus,

    #[error("configuration error: {0}")]
    Config(String),

    /// Both sides of an alignment stopped sharing the same canonical character stream.
    #[error("streams diverge at gold line {gold_line}, system line {sys_line}: {detail}")]
    Divergence {
        gold_line: usize,
        sys_line: usize,
        detail: String,
    },

    #[error("baseline error count is zero; errors fixed is undefined")]
    UndefinedBaseline,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(source_name: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            source_name: source_name.into(),
            line,
            message: message.into(),
        }
    }
}

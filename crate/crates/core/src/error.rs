use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid parameters or scenario settings; nothing has been simulated.
    #[error("configuration error: {0}")]
    Config(String),

    /// Malformed input data such as a dose schedule or a record file.
    #[error("input error: {0}")]
    Input(String),

    /// A metric or graph query outside what the run recorded.
    #[error("query error: {0}")]
    Query(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn query(msg: impl Into<String>) -> Self {
        Error::Query(msg.into())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

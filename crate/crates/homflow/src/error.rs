use thiserror::Error;

/// Errors across the library. `Config` covers bad user input, `Structure`
/// covers violated algebraic preconditions, `Numerical` covers runtime
/// failures of iterative procedures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
    pub fn structure(msg: impl Into<String>) -> Self {
        Error::Structure(msg.into())
    }
    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}

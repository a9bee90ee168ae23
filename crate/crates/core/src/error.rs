use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{what} {requested} exceeds the configured cap {cap}")]
    Capacity {
        what: &'static str,
        requested: u64,
        cap: u64,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{a} is not invertible modulo {m}")]
    NotInvertible { a: i64, m: i64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

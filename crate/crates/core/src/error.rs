use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (e.g. `n = 0`).
    #[error("domain error: {0}")]
    Domain(String),
    /// A parent map that is not a rooted tree on `1..=n`.
    #[error("malformed tree: {0}")]
    Structure(String),
    #[error("invalid input: {0}")]
    Validation(String),
    /// Exhaustive enumeration requested above its size guard.
    #[error("resource guard: {0}")]
    Resource(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

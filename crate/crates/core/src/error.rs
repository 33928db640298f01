use thiserror::Error;

/// Errors raised by state construction, verification and the protocols.
#[derive(Debug, Error)]
pub enum PmeError {
    /// Malformed arguments: shapes, ranges, non-unitary matrices.
    #[error("invalid input: {0}")]
    Input(String),

    /// A documented precondition on the input state does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A numerical check (unitarity, maximal mixedness) failed.
    #[error("verification failed: {what} (deviation {deviation:e})")]
    Verification { what: String, deviation: f64 },

    /// A recovery set of players is not allowed to reconstruct the secret.
    #[error("unauthorized: {0}")]
    Authorization(String),

    /// The requested computation exceeds the supported size.
    #[error("resource limit: {0}")]
    Resource(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, PmeError>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(PmeError::Input(msg.into()))
}

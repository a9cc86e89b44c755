use thiserror::Error;

/// Errors raised by the simulation library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The register is too large to be materialized as a dense matrix.
    #[error("register of {qubits} qubits exceeds the dense cap of {cap} qubits")]
    Capacity { qubits: usize, cap: usize },

    /// An input violated a documented precondition.
    #[error("invalid input: {0}")]
    Validation(String),

    /// A numerical routine failed or produced an out-of-range value.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Two independent routes to the same quantity disagree.
    #[error("{check} at theta = {theta}: expected {expected}, got {actual} (deviation {deviation:.3e})")]
    Mismatch {
        check: String,
        theta: f64,
        expected: f64,
        actual: f64,
        deviation: f64,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn validation<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Validation(msg.into()))
}

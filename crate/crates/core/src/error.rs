use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid Pauli string {0:?}")]
    InvalidPauli(String),

    #[error("{qubits} qubits exceeds the dense cap of {cap}")]
    DenseCapExceeded { qubits: usize, cap: usize },

    #[error("invalid Hamiltonian: {0}")]
    InvalidHamiltonian(String),

    #[error("term index {index} out of range for {terms} terms")]
    IndexOutOfRange { index: usize, terms: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("least-squares fit is degenerate: {0}")]
    DegenerateFit(String),

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

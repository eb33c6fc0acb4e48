use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error)]
pub enum SimError {
    #[error("tensor product of an empty list")]
    EmptyTensorProduct,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitIndexOutOfRange { index: usize, num_qubits: usize },

    #[error("repeated qubit index {0}")]
    RepeatedQubitIndex(usize),

    #[error("state is not normalized (norm = {0})")]
    NotNormalized(f64),

    #[error("matrix is not unitary (max |UU† - I| entry = {0:.3e})")]
    NotUnitary(f64),

    #[error("non-finite amplitude or matrix entry")]
    NonFinite,

    #[error("invalid coefficient: {0}")]
    InvalidCoefficient(String),

    #[error("register too large: {requested} parties exceeds the cap of {cap}")]
    TooManyParties { requested: usize, cap: usize },

    #[error("graph too large: {0} vertices (cap is 12)")]
    GraphTooLarge(usize),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("parameters are not covered by any tabulated row")]
    NotTabulated,

    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

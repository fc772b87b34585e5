use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("width mismatch: expected {expected} qubits, got {actual}")]
    WidthMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for width {width}")]
    QubitOutOfRange { index: usize, width: usize },

    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),

    #[error("two-qubit gate on non-adjacent qubits ({0}, {1})")]
    NonAdjacentGate(usize, usize),

    #[error("width {width} exceeds the {backend} capacity of {cap} qubits")]
    Capacity {
        backend: &'static str,
        width: usize,
        cap: usize,
    },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("observable is not diagonal in the computational basis")]
    NonDiagonalObservable,

    #[error("extrapolation fit failed: {0}")]
    FitFailure(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

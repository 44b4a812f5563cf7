use thiserror::Error;

/// Unified error type for simulator, protocol, and experiment layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("register limit exceeded: {requested} qubits (max {max})")]
    RegisterLimit { requested: usize, max: usize },

    #[error("state is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("index {index} out of range (len {len})")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cannot amplitude-encode the all-zero vector")]
    ZeroVector,

    #[error("state supply exhausted after {drawn} of {requested} samples")]
    SupplyExhausted { drawn: usize, requested: usize },

    #[error("entangled pair {0} already consumed")]
    PairConsumed(u64),

    #[error("entangled pair {0} is not in the required stage: {1}")]
    PairStage(u64, &'static str),

    #[error("unknown entangled pair handle {0}")]
    UnknownPair(u64),

    #[error("entangled-pair budget exhausted ({budget} provisioned, {used} used)")]
    PairBudget { budget: usize, used: usize },

    #[error("unknown endpoint `{0}`")]
    UnknownEndpoint(String),

    #[error("response decode produced non-bit values: {0:?}")]
    DecodeFailure(Vec<i64>),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(String),

    #[error("malformed file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serde(e.to_string())
    }
}

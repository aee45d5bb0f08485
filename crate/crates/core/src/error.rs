use num_bigint::BigUint;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed network file: {0}")]
    Syntax(String),
    #[error("self-loop on vertex {vertex:?} (edge {edge})")]
    SelfLoop { edge: usize, vertex: String },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("duplicate vertex {0:?}")]
    DuplicateVertex(String),
    #[error("missing {0}")]
    MissingTerminal(&'static str),
    #[error("source and sink must differ (both {0:?})")]
    SourceIsSink(String),
    #[error("edge {edge} has capacity {capacity}, capacities must be at least 1")]
    BadCapacity { edge: usize, capacity: String },
    #[error("scale factor must be positive")]
    ZeroScale,
    #[error("cannot factorize 0")]
    FactorizeZero,
    #[error("flow does not match the network: {0}")]
    Mismatch(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("source and sink are disconnected")]
    Disconnected,
    #[error("k = {k} is below k_min = {k_min}")]
    KTooSmall { k: BigUint, k_min: BigUint },
    #[error("brute-force search space {size} exceeds cap {cap}")]
    SearchTooLarge { size: String, cap: u64 },
    #[error("tensor contraction needs {needed} entries, budget is {budget}")]
    BudgetExceeded { needed: String, budget: usize },
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid rational {0:?}")]
    BadRational(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

use thiserror::Error;

/// Errors reported by the library.
///
/// Contract violations that indicate a caller bug (out-of-range memory,
/// malformed permutations) panic instead; `Error` covers the operational
/// failure modes the interfaces promise to report.
#[derive(Debug, Error)]
pub enum Error {
    #[error("permutation enumeration refused: k = {k} exceeds the guard {max}")]
    PermutationGuard { k: usize, max: usize },

    #[error("acyclic-set search refused: {nodes} nodes exceed the guard {max}")]
    SearchGuard { nodes: usize, max: usize },

    #[error("inequality enumeration refused: {count} (d, u) pairs exceed the guard {max}")]
    EnumerationGuard { count: u128, max: u128 },

    #[error("split parameter t = {t} outside [0:{k}]")]
    SplitOutOfRange { t: usize, k: usize },

    #[error("per-user memory {memory} does not match t*N/K = {expected}")]
    MemoryMismatch { memory: String, expected: String },

    #[error("small-cache coded scheme requires K >= N and M = 1/K, got N = {n}, K = {k}, M = {m}")]
    CodedSchemePrecondition { n: usize, k: usize, m: String },

    #[error("N < K unsupported for converse (N = {n}, K = {k})")]
    UnsupportedRegime { n: usize, k: usize },

    #[error("invalid demand vector: {0}")]
    InvalidDemand(String),

    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),

    #[error("invalid tradeoff curve: {0}")]
    InvalidCurve(String),

    #[error("no graph node with requester {requester} and subset mask {mask}")]
    UnknownNode { requester: usize, mask: u32 },
}

pub type Result<T> = std::result::Result<T, Error>;

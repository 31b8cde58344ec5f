use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("segment length {0} is odd; pairing needs even halves")]
    OddLength(usize),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("linear system has no solution")]
    NoSolution,

    #[error("singular system for node set {nodes:?}")]
    SingularSystem { nodes: Vec<usize> },

    #[error("repair strategy for node {node} does not determine its payload")]
    StrategyIncomplete { node: usize },

    #[error("{0} is not an odd prime")]
    NotPrime(usize),

    #[error("GF(2^{w}) has too few elements for n = {n}")]
    FieldTooSmall { n: usize, w: usize },

    #[error("invalid code parameters: {0}")]
    InvalidParameters(String),

    #[error("sub-packetization {0} is odd; space-share two instances first")]
    OddSubpacketization(usize),

    #[error("bad target set: {0}")]
    BadTargets(String),

    #[error("node {0} is not a target node")]
    NotATarget(usize),

    #[error("node {0} is a target node, not a remainder node")]
    NotARemainder(usize),

    #[error("node {node}: repair matrix for helper {helper} is not paired block-diagonal (entry {row},{col})")]
    R1Violation {
        node: usize,
        helper: usize,
        row: usize,
        col: usize,
    },

    #[error("node {node}: permutations are not symmetric and target repair matrices differ")]
    R2Violation { node: usize },

    #[error("helper count d = {d} outside [{k}, {max}]")]
    BadHelperCount { d: usize, k: usize, max: usize },

    #[error("round {round}, node {node}: {reason}")]
    PropagationFailure {
        round: usize,
        node: usize,
        reason: String,
    },

    #[error("base repair strategy for node {node} is invalid: {reason}")]
    BaseStrategyInvalid { node: usize, reason: String },

    #[error("repair of node {node} returned a wrong payload")]
    PayloadMismatch { node: usize },

    #[error("format error: {0}")]
    Format(String),
}

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a supported prime")]
    InvalidModulus(u64),
    #[error("operands belong to different fields (F_{left} and F_{right})")]
    MixedFields { left: u64, right: u64 },
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("node id {id} is not a nonzero element of F_{q}")]
    NodeIdOutOfField { id: u64, q: u64 },
    #[error("duplicate node id {0}")]
    DuplicateId(u64),
    #[error("expected {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("no codeword within the error budget")]
    DecodeFailure,
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("unknown node {0}")]
    UnknownNode(usize),
    #[error("invalid edge {from} -> {to}: {reason}")]
    InvalidEdge {
        from: usize,
        to: usize,
        reason: &'static str,
    },
    #[error("graph file line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("node {0} is a dealer neighbour and receives its share directly")]
    DirectNeighbour(usize),
    #[error("node {node} has only {available} disjoint paths, {required} required")]
    Infeasible {
        node: usize,
        available: usize,
        required: usize,
    },
    #[error("enumeration of {required} runs exceeds the budget of {budget}")]
    EnumerationBudget { required: u128, budget: u128 },
}

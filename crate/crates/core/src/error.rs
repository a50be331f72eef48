use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid chain: {0}")]
    InvalidChain(String),
    #[error("chain is not closed under {op}: {detail}")]
    ChainNotClosed { op: &'static str, detail: String },
    #[error("chain is not symmetric under x -> 1-x: {0} has no mirror degree")]
    ChainNotSymmetric(String),
    #[error("invalid hedge: {0}")]
    InvalidHedge(String),
    #[error("degree {0} is not a member of the chain")]
    NotInChain(String),
    #[error("universe mismatch: expected {expected} attributes, found {found}")]
    UniverseMismatch { expected: usize, found: usize },
    #[error("invalid universe: {0}")]
    InvalidUniverse(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("not an isotone Galois connection: {0}")]
    NotAdjoint(String),
    #[error("{what} exceeds cap {cap}")]
    CapExceeded { what: String, cap: u64 },
    #[error("not an S-closure system: {0}")]
    NotClosureSystem(String),
    #[error("theory is not complete in the context")]
    NotComplete,
    #[error("step {step}: {reason}")]
    InvalidStep { step: usize, reason: String },
    #[error("proof ends with {found} but the goal is {expected}")]
    GoalMismatch { expected: String, found: String },
    #[error("invalid proof: {0}")]
    InvalidProof(String),
    #[error("goal is not provable (not semantically entailed)")]
    NotProvable,
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

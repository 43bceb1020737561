use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {context}")]
    DimensionMismatch { context: String },

    #[error("presentation has free rank {free_rank}; the cokernel is infinite")]
    InfiniteGroup { free_rank: usize },

    #[error("invariant factors {factors:?} do not form a divisibility chain of integers >= 2")]
    NotInvariantFactors { factors: Vec<String> },

    #[error("matrix entry at row {row}, col {col} does not respect the source relations")]
    NotWellDefined { row: usize, col: usize },

    #[error("operator '{label}' is not compatible with the map")]
    NotEquivariant { label: String },

    #[error("group of order {order} is not {l}-primary")]
    NotLPrimary { l: u64, order: String },

    #[error("composition mismatch: {context}")]
    CompositionMismatch { context: String },

    #[error("towers over different primes ({left} and {right})")]
    PrimeMismatch { left: u64, right: u64 },

    #[error("{l} is not a prime")]
    NotPrime { l: u64 },

    #[error("level {level} is not represented (horizon {horizon})")]
    LevelUnavailable { level: usize, horizon: usize },

    #[error("invalid tail rule: {context}")]
    InvalidTail { context: String },

    #[error("tower is not Artin-Rees l-adic: {reason}")]
    NotArLAdic { reason: String },

    #[error("tower is not l-adic: {reason}")]
    NotLAdic { reason: String },

    #[error("invariant factors have not stabilised by level {level}")]
    NonStabilizing { level: usize },

    #[error("subtraction leaves the hypernaturals: {context}")]
    NegativeResult { context: String },

    #[error("index {index} is finite; an infinite hypernatural is required")]
    FiniteIndex { index: String },

    #[error("precondition violated: {context}")]
    PreconditionViolated { context: String },

    #[error("parse error: {0}")]
    Parse(String),
}

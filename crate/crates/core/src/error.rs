use thiserror::Error;

/// Errors raised by the coding library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum IldError {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),

    #[error("support violation: letter {letter} has p = {p} but target mass 0")]
    SupportViolation { letter: usize, p: f64 },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("invalid symbol string: {0}")]
    InvalidString(String),

    #[error("typical set is empty for n = {n}, eps = {eps}")]
    EmptyTypicalSet { n: usize, eps: f64 },

    #[error("argument out of range: {0}")]
    Range(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("explicit materialization of {size} strings exceeds the cap of {cap}")]
    SizeLimit { size: String, cap: u64 },

    #[error("string is not a member of the codebook")]
    NotInCodebook,

    #[error("component pmfs do not factor the target: {0}")]
    FactorizationMismatch(String),

    #[error("message set of {set_size} strings does not fit into 2^{bits} seeds")]
    BudgetTooSmall { set_size: u64, bits: u32 },

    #[error("message {0} owns no strings")]
    EmptySet(usize),

    #[error("bracket term {0} is not below 1")]
    BracketOverflow(f64),

    #[error("invalid codebook specification: {0}")]
    BadSpec(String),
}

pub type Result<T> = std::result::Result<T, IldError>;

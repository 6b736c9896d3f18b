use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("requested length {requested} exceeds oracle horizon {max_len}")]
    HorizonExceeded { requested: usize, max_len: usize },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("invalid presentation: {0}")]
    InvalidPresentation(String),

    #[error("substitution is not primitive")]
    NotPrimitive,

    #[error("invalid beta expansion: {0}")]
    InvalidExpansion(String),

    #[error("presentation is not irreducible")]
    NotIrreducible,

    #[error("no synchronizing words found at level {0} within the word-length bound")]
    EmptySyncLevel(usize),

    #[error("commutation relation fails at level {level}, entry ({row}, {col}): {relation}")]
    CommutationFailure {
        level: usize,
        row: usize,
        col: usize,
        relation: &'static str,
    },

    #[error("at least {needed} levels are required, got {got}")]
    InsufficientLevels { needed: usize, got: usize },

    #[error("word `{0}` is not admissible")]
    NotAdmissible(String),

    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
}

pub type Result<T> = std::result::Result<T, Error>;

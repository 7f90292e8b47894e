use thiserror::Error;

/// Errors raised by automaton constructions, queries and checkers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("determinization exceeded the state cap of {cap}")]
    StateCap { cap: usize },
    #[error("accepting runs are only defined for non-empty words")]
    EmptyWord,
    #[error("the zero polynomial has no automaton")]
    ZeroPolynomial,
    #[error("concatenation is ambiguous: some word splits in two ways")]
    Ambiguous,
    #[error("invalid automaton: {0}")]
    InvalidAutomaton(String),
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    #[error("unbound relation `{0}`")]
    UnboundRelation(String),
    #[error("arity mismatch for `{name}`: expected {expected}, got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid parameters: {0}")]
    Parameters(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("`{0}` is not a root")]
    NotARoot(String),
    #[error("census size {n} exceeds the configured cap {cap}")]
    CensusCap { n: u64, cap: u64 },
    #[error("language is infinite")]
    Infinite,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by a configured resource bound.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::StateCap { .. } | Error::CensusCap { .. })
    }
}

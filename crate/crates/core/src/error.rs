use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("q-binomial needs k <= n, got n = {n}, k = {k}")]
    BinomialRange { n: usize, k: usize },

    #[error("a composition needs at least one part")]
    EmptyComposition,

    #[error("composition parts sum to {actual}, expected {declared}")]
    CompositionSum { declared: usize, actual: usize },

    #[error("alphabet size must be at least 1")]
    EmptyAlphabet,

    #[error("letter {letter} at position {position} is outside 1..={m}")]
    LetterOutOfRange { letter: u32, position: usize, m: u32 },

    #[error("lattice paths need a binary alphabet, got m = {0}")]
    NotBinary(u32),

    #[error("invalid Ferrers diagram: {0}")]
    InvalidFerrers(String),

    #[error("enumerating {requested} words exceeds the budget of {budget}")]
    BudgetExceeded { requested: String, budget: u64 },

    #[error("degenerate distribution for n = {n}, m = {m}: standard deviation is zero")]
    Degenerate { n: usize, m: u32 },

    #[error("standard deviation must be positive and finite, got {0}")]
    NonPositiveSd(String),

    #[error("U-statistic sample has duplicate y value {0}")]
    DuplicateY(f64),

    #[error("y value {0} is outside the open interval (0, 1)")]
    YOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

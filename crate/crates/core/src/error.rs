use thiserror::Error;

/// Errors raised by table construction, conditioning, model builders and searches.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("entries sum to {sum}, not 1")]
    NotNormalized { sum: f64 },

    #[error("negative probability {value} at {at}")]
    NegativeEntry { at: String, value: f64 },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("variable `{0}` declared more than once")]
    DuplicateVariable(String),

    #[error("variable `{name}` has alphabet size 0")]
    EmptyAlphabet { name: String },

    #[error("invalid alias on `{name}`: {reason}")]
    InvalidAlias { name: String, reason: String },

    #[error("alias `{alias}` differs from `{target}` on an assignment with mass {mass}")]
    AliasViolation {
        alias: String,
        target: String,
        mass: f64,
    },

    #[error("symbol {symbol} out of range for `{name}` (alphabet size {size})")]
    SymbolOutOfRange {
        name: String,
        symbol: usize,
        size: usize,
    },

    #[error("assignment does not cover variable `{0}`")]
    IncompleteAssignment(String),

    #[error("assignment {0} listed twice")]
    DuplicateAssignment(String),

    #[error("conditioning event {0} has zero probability")]
    ZeroProbabilityEvent(String),

    #[error("variables {0} appear on both sides")]
    OverlappingVariables(String),

    #[error("factor for `{0}` is conditioned on a variable that is not produced by an earlier factor")]
    CyclicFactorization(String),

    #[error("no factor produces `{0}`")]
    MissingVariable(String),

    #[error("`{0}` is produced by more than one factor")]
    DuplicateTarget(String),

    #[error("table of {size} entries exceeds the cap of {cap}")]
    CapExceeded { size: u128, cap: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("state amplitudes have squared norm {norm}")]
    NotNormalizedState { norm: f64 },

    #[error("measurement direction has norm {norm}")]
    NotUnitSetting { norm: f64 },

    #[error("inconsistent model spec: {0}")]
    InconsistentSpec(String),

    #[error("{0} is not a probability")]
    InvalidProbability(String),

    #[error("search budget must be at least 1")]
    InvalidBudget,

    #[error("penalty weight must be positive, got {0}")]
    InvalidPenalty(f64),

    #[error("invalid query: {0}")]
    InvalidQuery(String),
}

pub type Result<T> = std::result::Result<T, Error>;

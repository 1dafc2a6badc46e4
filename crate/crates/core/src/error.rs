use thiserror::Error;

/// Errors raised by the simulator, the circuit executors and the bound calculators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NonUnitaryMatrix { deviation: f64 },

    #[error("unknown register `{0}`")]
    UnknownRegister(String),

    #[error("branch `{register}` = {value} has probability {probability:.3e}")]
    ZeroProbabilityBranch {
        register: String,
        value: usize,
        probability: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),

    #[error("register `{register}` has {found} qubits, expected {expected}")]
    RegisterSizeMismatch {
        register: String,
        expected: usize,
        found: usize,
    },

    #[error("{requested} qubits requested, budget is {cap}")]
    QubitBudgetExceeded { requested: usize, cap: usize },

    #[error("reweighted outcome distribution sums to {total} at step {step}")]
    ReweightNotStochastic { step: usize, total: f64 },

    #[error("register `{register}` is entangled (purity {purity:.12})")]
    CopyOfEntangledRegister { register: String, purity: f64 },

    #[error("non-adaptive oracle allows a single parallel query round")]
    SecondParallelQuery,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("{0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("enumeration of {requested} items exceeds budget {budget}")]
    EnumerationBudgetExceeded { requested: u128, budget: u128 },

    #[error("invalid weight scheme: {0}")]
    InvalidScheme(String),

    #[error("no state supplied for input #{0}")]
    MissingState(usize),

    #[error("no budget up to {cap} reached the target success rate")]
    BudgetCapReached { cap: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

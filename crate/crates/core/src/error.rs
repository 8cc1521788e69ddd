use thiserror::Error;

/// Errors surfaced by the library's validated operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument fell outside an operation's stated domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation that needs at least one element got none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// A private value's recorded budget disagrees with the caller's.
    #[error("privacy budget mismatch: expected mu = {expected}, got {got}")]
    BudgetMismatch { expected: f64, got: f64 },

    /// A private value's recorded sensitivity disagrees with the caller's.
    #[error("sensitivity mismatch: expected delta = {expected}, got {got}")]
    SensitivityMismatch { expected: f64, got: f64 },

    /// Aggregation weights must sum to one.
    #[error("weights sum to {sum}, expected 1 within 1e-12")]
    WeightSum { sum: f64 },

    /// Weighted averaging is only defined for a common per-component budget.
    #[error("weighted_average requires equal per-component budgets")]
    MixedBudgets,

    /// The independent product requires canonical-mechanism provenance.
    #[error("independent_product requires components produced by the canonical mechanism")]
    NonCanonicalProvenance,

    /// Peeling size out of range for the input length.
    #[error("peeling size {s} out of range for {m} hypotheses")]
    PeelSize { s: usize, m: usize },

    /// The margin budget must leave room for the peeling stage.
    #[error("margin budget mu0 = {mu0} must satisfy 0 < mu0 < mu = {mu}")]
    MarginBudget { mu0: f64, mu: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A count row summed to zero, so the expected model is undefined.
    #[error("count row {row} has zero total")]
    ZeroRowTotal { row: usize },

    #[error("count vector for a Dirichlet draw is all zero")]
    EmptyDirichlet,

    #[error("non-positive count {value} in Dirichlet normalizer")]
    NonPositiveCount { value: f64 },

    #[error("particle filter is empty")]
    EmptyBelief,

    /// Rejection sampling gave up: the real observation is implausible
    /// under the current belief.
    #[error(
        "belief deprivation: {accepted} of {needed} particles accepted after {attempts} attempts (rate {acceptance_rate:.3e})"
    )]
    Deprived {
        accepted: usize,
        needed: usize,
        attempts: usize,
        acceptance_rate: f64,
    },

    #[error("observation has zero probability under the belief")]
    ImpossibleObservation,

    #[error("planner asked to run zero simulations")]
    NoSimulations,

    #[error("root node has no visited actions")]
    NoVisitedActions,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! Exact small-instance references: history probabilities, Bayes updates
//! and expectimax values.

mod belief;
mod history;

pub use belief::{brute_force_expectimax, exact_belief_update, AugmentedKey, EnumeratedBelief};
pub use history::{
    closed_form_history_prob, empirical_rollout_distribution, enumerate_histories, exact_history_distribution,
    log_dirichlet_normalizer, sequential_history_prob, tv_distance, FullHistory, HistoryDistribution, HistoryStep,
    RolloutKind, RolloutPolicy, UniformPolicy,
};

//! Experiment harness for BA-POMCP: learning runs, CSV output, summary
//! statistics and the oracle suite.

pub mod config;
pub mod output;
pub mod runner;
pub mod stats;
pub mod verify;

pub use config::{ConfigError, DomainKind, ExperimentConfig, PlannerKind, PriorKind};
pub use runner::{measure_action_time, run_learning, run_single, LearningResult, RunOutcome, RunRecord};
pub use stats::{aggregate_stats, EpisodeStats, Summary};

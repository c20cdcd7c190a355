//! Monte-Carlo tree search for Bayes-adaptive POMDPs.
//!
//! The unknown dynamics of a discrete POMDP are tracked as Dirichlet counts
//! carried inside each hidden state. [`planner::Planner`] runs BA-POMCP over
//! a particle belief of such augmented states, optionally with root-sampled
//! models, expected-model stepping and linking-state particles.
//!
//! Everything is generic over the [`Scalar`] type; the aliases below fix it
//! to `f64` (or `f32` with the `32` suffix).

pub mod belief;
pub mod counts;
pub mod domain;
pub mod domains;
pub mod error;
pub mod model;
pub mod num;
pub mod oracle;
pub mod planner;
pub mod rng;
pub mod space;
pub mod step;

pub use counts::{expected_prob, increment_count, CountView, Factorization, Layout, RowId};
pub use domain::{default_exploration, Domain, Outcome};
pub use error::{Error, Result};
pub use num::Scalar;
pub use planner::Variants;
pub use space::{ActionIndex, ObservationIndex, Spaces, StateIndex};
pub use step::StepKind;

pub type CountTable = counts::CountTable<f64>;
pub type AugmentedState = belief::AugmentedState<f64>;
pub type LinkingState = belief::LinkingState<f64>;
pub type ParticleFilter = belief::ParticleFilter<AugmentedState>;
pub type LinkingFilter = belief::ParticleFilter<LinkingState>;
pub type SampledModel = model::SampledModel<f64>;
pub type PlannerConfig = planner::PlannerConfig<f64>;
pub type Planner = planner::Planner<f64>;
pub type Tiger = domains::Tiger<f64>;
pub type Sysadmin = domains::Sysadmin<f64>;
pub type Chain = domains::Chain<f64>;

pub type CountTable32 = counts::CountTable<f32>;
pub type AugmentedState32 = belief::AugmentedState<f32>;
pub type LinkingState32 = belief::LinkingState<f32>;
pub type ParticleFilter32 = belief::ParticleFilter<AugmentedState32>;
pub type LinkingFilter32 = belief::ParticleFilter<LinkingState32>;
pub type PlannerConfig32 = planner::PlannerConfig<f32>;
pub type Planner32 = planner::Planner<f32>;

//! BA-POMCP tree search and the lookahead baseline.

mod config;
mod lookahead;
mod search;
mod tree;

pub use config::{PlannerConfig, Variants};
pub use lookahead::{lookahead_plan, lookahead_values};
pub use search::{plan, CountingSim, PlanStats, Planner, RootExpectedSim, RootSampledSim, SearchCore, SimState};
pub use tree::{NodeId, SearchNode, SearchTree};

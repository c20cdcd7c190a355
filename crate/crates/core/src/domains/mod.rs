//! Benchmark domains.

pub mod chain;
pub mod sysadmin;
pub mod tiger;

pub use chain::Chain;
pub use sysadmin::{Sysadmin, SysadminPrior};
pub use tiger::Tiger;

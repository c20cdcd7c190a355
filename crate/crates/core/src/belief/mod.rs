//! Particle-filter beliefs over augmented states.

mod filter;
mod linking;
mod particle;

pub use filter::{ParticleFilter, RejectionConfig, UpdateStats};
pub use linking::{Delta, LinkingState};
pub use particle::{copy_particle, AugmentedState, CopyMeter, Particle};

use std::sync::Arc;

use rand::Rng;

use crate::belief::linking::LinkingState;
use crate::belief::particle::{AugmentedState, CopyMeter, Particle};
use crate::counts::CountTable;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};
use crate::step::{sample_counting_transition, StepBuffers, StepKind};

/// Unweighted particle filter: each of the `K` particles carries mass `1/K`.
#[derive(Clone, Debug)]
pub struct ParticleFilter<P> {
    particles: Vec<P>,
}

/// Settings for a rejection-sampling belief update.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RejectionConfig {
    pub step: StepKind,
    /// Merge threshold for linking particles.
    pub lambda: usize,
    /// Give up after this many simulated particles.
    pub max_attempts: usize,
}

impl RejectionConfig {
    /// Defaults: `λ = 30`, at most `1000·K` attempts.
    pub fn new(step: StepKind, num_particles: usize) -> Self {
        Self {
            step,
            lambda: 30,
            max_attempts: 1000 * num_particles.max(1),
        }
    }
}

/// Bookkeeping from one rejection update.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UpdateStats {
    pub attempts: usize,
    pub accepted: usize,
    pub copies: CopyMeter,
}

impl UpdateStats {
    pub fn acceptance_rate(&self) -> f64 {
        if self.attempts == 0 {
            0.0
        } else {
            self.accepted as f64 / self.attempts as f64
        }
    }
}

impl<P> ParticleFilter<P> {
    pub fn new(particles: Vec<P>) -> Self {
        Self { particles }
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[P] {
        &self.particles
    }

    pub fn iter(&self) -> std::slice::Iter<'_, P> {
        self.particles.iter()
    }

    /// Uniformly random particle, by reference.
    pub fn sample_particle<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<&P> {
        if self.particles.is_empty() {
            return Err(Error::EmptyBelief);
        }
        Ok(&self.particles[rng.random_range(0..self.particles.len())])
    }
}

impl<F: Scalar> ParticleFilter<AugmentedState<F>> {
    /// `K` plain particles, each with its own copy of `prior`.
    pub fn plain_from_prior<R: Rng + ?Sized>(
        prior: &CountTable<F>,
        k: usize,
        mut initial_state: impl FnMut(&mut R) -> StateIndex,
        rng: &mut R,
    ) -> Self {
        Self::new(
            (0..k)
                .map(|_| AugmentedState::new(initial_state(rng), prior.clone()))
                .collect(),
        )
    }
}

impl<F: Scalar> ParticleFilter<LinkingState<F>> {
    /// `K` linking particles all pointing at one shared copy of `prior`.
    pub fn linking_from_prior<R: Rng + ?Sized>(
        prior: &CountTable<F>,
        k: usize,
        mut initial_state: impl FnMut(&mut R) -> StateIndex,
        rng: &mut R,
    ) -> Self {
        let base = Arc::new(prior.clone());
        Self::new(
            (0..k)
                .map(|_| LinkingState::new(initial_state(rng), base.clone()))
                .collect(),
        )
    }
}

impl<P> ParticleFilter<P> {
    /// Redraws every particle's state, keeping its counts.
    pub fn reset_states<F: Scalar, R: Rng + ?Sized>(
        &mut self,
        mut initial_state: impl FnMut(&mut R) -> StateIndex,
        rng: &mut R,
    ) where
        P: Particle<F>,
    {
        for p in &mut self.particles {
            p.set_state(initial_state(rng));
        }
    }

    /// Rejection-sampling update for action `a` and real observation `z`.
    ///
    /// Repeatedly samples a particle, simulates `a` on it and keeps the
    /// result only if the simulated observation equals `z`. The particle is
    /// copied only once its simulated observation is accepted; a rejected
    /// copy would be discarded unobserved, so the outcome distribution is the
    /// same as copying first.
    pub fn rejection_update<F: Scalar, R: Rng + ?Sized>(
        &self,
        a: ActionIndex,
        z: ObservationIndex,
        cfg: &RejectionConfig,
        rng: &mut R,
    ) -> Result<(Self, UpdateStats)>
    where
        P: Particle<F>,
    {
        let k = self.particles.len();
        if k == 0 {
            return Err(Error::EmptyBelief);
        }
        let mut bufs = StepBuffers::<F>::new();
        let mut stats = UpdateStats::default();
        let mut next = Vec::with_capacity(k);
        while next.len() < k {
            if stats.attempts >= cfg.max_attempts {
                return Err(Error::Deprived {
                    accepted: next.len(),
                    needed: k,
                    attempts: stats.attempts,
                    acceptance_rate: stats.acceptance_rate(),
                });
            }
            stats.attempts += 1;
            let particle = &self.particles[rng.random_range(0..k)];
            let (s_next, z_sim) =
                sample_counting_transition(particle, particle.state(), a, cfg.step, rng, &mut bufs)?;
            if z_sim != z {
                continue;
            }
            stats.accepted += 1;
            stats.copies.record(particle.copy_bytes());
            let mut accepted = particle.clone();
            accepted.apply_transition(a, s_next, z_sim);
            accepted.after_belief_update(cfg.lambda);
            next.push(accepted);
        }
        Ok((Self::new(next), stats))
    }
}

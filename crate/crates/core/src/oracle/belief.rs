//! Exact Bayes updates over an enumerated set of augmented states.

use std::collections::BTreeMap;

use crate::belief::{Particle, ParticleFilter};
use crate::counts::{expected_prob, CountTable, CountView};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};

/// Key identifying an augmented state exactly: the state and the bit
/// patterns of every count.
pub type AugmentedKey = (usize, Vec<u64>);

/// A finite distribution over augmented states `⟨s, χ⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct EnumeratedBelief<F> {
    support: Vec<(StateIndex, CountTable<F>, F)>,
}

fn key_of<F: Scalar, V: CountView<F>>(s: StateIndex, counts: &V) -> AugmentedKey {
    let len = counts.layout().len();
    (s.0, (0..len).map(|i| counts.count(i).to_f64_lossy().to_bits()).collect())
}

impl<F: Scalar> EnumeratedBelief<F> {
    /// Merges identical entries and normalizes. Zero-weight entries are
    /// dropped.
    pub fn new(entries: impl IntoIterator<Item = (StateIndex, CountTable<F>, F)>) -> Result<Self> {
        let mut merged: BTreeMap<AugmentedKey, (StateIndex, CountTable<F>, F)> = BTreeMap::new();
        for (s, c, w) in entries {
            if !(w > F::zero()) {
                continue;
            }
            merged
                .entry(key_of(s, &c))
                .and_modify(|e| e.2 += w)
                .or_insert((s, c, w));
        }
        let total: F = merged.values().map(|e| e.2).sum();
        if !(total > F::zero()) {
            return Err(Error::EmptyBelief);
        }
        Ok(Self {
            support: merged
                .into_values()
                .map(|(s, c, w)| (s, c, w / total))
                .collect(),
        })
    }

    /// Every state of the initial distribution paired with `prior`.
    pub fn from_prior(initial: &[(StateIndex, F)], prior: &CountTable<F>) -> Result<Self> {
        Self::new(initial.iter().map(|&(s, p)| (s, prior.clone(), p)))
    }

    pub fn from_particles<P: Particle<F>>(filter: &ParticleFilter<P>) -> Result<Self> {
        let w = F::one();
        let layout_len = |p: &P| p.layout().len();
        Self::new(filter.iter().map(|p| {
            let counts: Vec<F> = (0..layout_len(p)).map(|i| p.count(i)).collect();
            let table = CountTable::from_vec(p.layout(), counts).expect("particle counts are valid");
            (p.state(), table, w)
        }))
    }

    pub fn support(&self) -> &[(StateIndex, CountTable<F>, F)] {
        &self.support
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// `b(s)` summed over counts.
    pub fn state_marginal(&self, states: usize) -> Vec<F> {
        let mut m = vec![F::zero(); states];
        for (s, _, w) in &self.support {
            m[s.0] += *w;
        }
        m
    }

    /// The distribution keyed by [`AugmentedKey`].
    pub fn as_map(&self) -> BTreeMap<AugmentedKey, F> {
        let mut m = BTreeMap::new();
        for (s, c, w) in &self.support {
            *m.entry(key_of(*s, c)).or_insert(F::zero()) += *w;
        }
        m
    }

    /// `P(z | b, a)` under each hypothesis' expected model.
    pub fn observation_likelihood(&self, a: ActionIndex, z: ObservationIndex) -> Result<F> {
        let layout = match self.support.first() {
            Some(e) => e.1.layout(),
            None => return Err(Error::EmptyBelief),
        };
        let mut total = F::zero();
        for (s, c, w) in &self.support {
            for next in 0..layout.spaces().states {
                total += *w * expected_prob(c, *s, a, StateIndex(next), z)?;
            }
        }
        Ok(total)
    }
}

/// `b'(⟨s', χ + δ⟩) ∝ Σ b(⟨s, χ⟩) · D_χ(s', z | s, a)`.
///
/// Returns the posterior and the likelihood `P(z | b, a)`.
pub fn exact_belief_update<F: Scalar>(
    belief: &EnumeratedBelief<F>,
    a: ActionIndex,
    z: ObservationIndex,
) -> Result<(EnumeratedBelief<F>, F)> {
    let mut next_support = Vec::new();
    let mut likelihood = F::zero();
    for (s, c, w) in &belief.support {
        for next in (0..c.layout().spaces().states).map(StateIndex) {
            let p = expected_prob(c, *s, a, next, z)?;
            if p > F::zero() {
                let mut counts = c.clone();
                counts.increment(*s, a, next, z);
                likelihood += *w * p;
                next_support.push((next, counts, *w * p));
            }
        }
    }
    if !(likelihood > F::zero()) {
        return Err(Error::ImpossibleObservation);
    }
    Ok((EnumeratedBelief::new(next_support)?, likelihood))
}

/// Exact per-action values of a depth-`depth` expectimax under expected
/// dynamics, leaf value 0.
pub fn brute_force_expectimax<F: Scalar, D: Domain<F>>(
    domain: &D,
    belief: &EnumeratedBelief<F>,
    depth: usize,
    discount: F,
) -> Result<Vec<F>> {
    let spaces = domain.spaces();
    (0..spaces.actions)
        .map(|a| action_value(domain, belief, ActionIndex(a), depth, discount))
        .collect()
}

fn action_value<F: Scalar, D: Domain<F>>(
    domain: &D,
    belief: &EnumeratedBelief<F>,
    a: ActionIndex,
    depth: usize,
    discount: F,
) -> Result<F> {
    if depth == 0 {
        return Ok(F::zero());
    }
    let mut q = F::zero();
    for (s, _, w) in belief.support() {
        q += *w * domain.reward(*s, a);
    }
    if depth == 1 {
        return Ok(q);
    }
    for z in (0..domain.spaces().observations).map(ObservationIndex) {
        match exact_belief_update(belief, a, z) {
            Ok((next, p_z)) => {
                let best = brute_force_expectimax(domain, &next, depth - 1, discount)?
                    .into_iter()
                    .fold(F::neg_infinity(), F::max);
                q += discount * p_z * best;
            }
            Err(Error::ImpossibleObservation) => {}
            Err(e) => return Err(e),
        }
    }
    Ok(q)
}

//! Two-state, two-action, two-observation domain with fully specified joint
//! dynamics. Small enough to enumerate every history.

use rand::Rng;

use crate::counts::{CountTable, CountView, Layout};
use crate::domain::{Domain, Outcome};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, Spaces, StateIndex};

pub const SPACES: Spaces = Spaces::new(2, 2, 2);

#[derive(Clone, Debug, PartialEq)]
pub struct Chain<F> {
    /// `D(s', z | s, a)` in joint layout order.
    dynamics: Vec<F>,
    /// `R(s, a)` at `s·|A| + a`.
    rewards: Vec<F>,
    prior: CountTable<F>,
    initial: Vec<F>,
}

impl<F: Scalar> Chain<F> {
    pub fn layout() -> Layout {
        Layout::joint(SPACES)
    }

    pub fn new(dynamics: Vec<F>, rewards: Vec<F>, prior: Vec<F>, initial: Vec<F>) -> Result<Self> {
        let layout = Self::layout();
        let prior = CountTable::from_vec(layout, prior)?;
        if let Some(row) = prior.first_empty_row() {
            return Err(Error::ZeroRowTotal { row: row.0 });
        }
        let table = CountTable::from_vec(layout, dynamics)?;
        let tol = F::lit(1e-9);
        for r in 0..layout.num_rows() {
            let total: F = table.row(crate::counts::RowId(r)).iter().copied().sum();
            if (total - F::one()).abs() > tol {
                return Err(Error::InvalidConfig(format!("dynamics row {r} sums to {total}")));
            }
        }
        if rewards.len() != SPACES.states * SPACES.actions {
            return Err(Error::InvalidConfig("one reward per state-action pair".into()));
        }
        let init_total: F = initial.iter().copied().sum();
        if initial.len() != SPACES.states || (init_total - F::one()).abs() > tol {
            return Err(Error::InvalidConfig("initial distribution must cover both states".into()));
        }
        Ok(Self {
            dynamics: table.as_slice().to_vec(),
            rewards,
            prior,
            initial,
        })
    }

    /// A random instance: dynamics, rewards in `[-1, 1]`, prior counts in
    /// `[0.5, 5]`.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let layout = Self::layout();
        let row_len = SPACES.states * SPACES.observations;
        let mut dynamics = Vec::with_capacity(layout.len());
        for _ in 0..layout.num_rows() {
            let w: Vec<F> = (0..row_len).map(|_| F::lit(rng.random_range(0.05..1.0))).collect();
            let total: F = w.iter().copied().sum();
            dynamics.extend(w.into_iter().map(|x| x / total));
        }
        let rewards = (0..SPACES.states * SPACES.actions)
            .map(|_| F::lit(rng.random_range(-1.0..1.0)))
            .collect();
        let prior = (0..layout.len()).map(|_| F::lit(rng.random_range(0.5..5.0))).collect();
        let p0 = F::lit(rng.random_range(0.1..0.9));
        Self::new(dynamics, rewards, prior, vec![p0, F::one() - p0]).expect("valid random instance")
    }

    pub fn prior_table(&self) -> &CountTable<F> {
        &self.prior
    }

    pub fn with_prior(mut self, prior: CountTable<F>) -> Result<Self> {
        if prior.layout() != Self::layout() {
            return Err(Error::InvalidConfig("chain prior must use the joint layout".into()));
        }
        self.prior = prior;
        Ok(self)
    }

    pub fn with_rewards(mut self, rewards: Vec<F>) -> Self {
        assert_eq!(rewards.len(), SPACES.states * SPACES.actions);
        self.rewards = rewards;
        self
    }
}

/// Action 0 keeps the state and action 1 flips it, each with probability
/// 0.9; the observation reports the new state with probability 0.9. Reward 1
/// for taking action `s` in state `s`. The prior puts 16 counts on the
/// intended outcome of each row and 1 on every other outcome.
impl<F: Scalar> Default for Chain<F> {
    fn default() -> Self {
        let (p_intended, accuracy) = (0.9, 0.9);
        let mut dynamics = Vec::with_capacity(16);
        let mut prior = Vec::with_capacity(16);
        for s in 0..2 {
            for a in 0..2 {
                let intended = if a == 0 { s } else { 1 - s };
                for next in 0..2 {
                    let pt = if next == intended { p_intended } else { 1.0 - p_intended };
                    for z in 0..2 {
                        let po = if z == next { accuracy } else { 1.0 - accuracy };
                        dynamics.push(F::lit(pt * po));
                        let dominant = next == intended && z == next;
                        prior.push(F::lit(if dominant { 16.0 } else { 1.0 }));
                    }
                }
            }
        }
        let rewards = (0..4).map(|i| F::lit(if i / 2 == i % 2 { 1.0 } else { 0.0 })).collect();
        Self::new(dynamics, rewards, prior, vec![F::lit(0.5), F::lit(0.5)]).expect("valid default chain")
    }
}

impl<F: Scalar> Domain<F> for Chain<F> {
    fn spaces(&self) -> Spaces {
        SPACES
    }

    fn layout(&self) -> Layout {
        Self::layout()
    }

    fn reward(&self, s: StateIndex, a: ActionIndex) -> F {
        self.rewards[s.0 * SPACES.actions + a.0]
    }

    fn reward_range(&self) -> (F, F) {
        let lo = self.rewards.iter().copied().fold(F::infinity(), F::min);
        let hi = self.rewards.iter().copied().fold(F::neg_infinity(), F::max);
        (lo, hi)
    }

    fn true_dynamics(&self, s: StateIndex, a: ActionIndex) -> Vec<Outcome<F>> {
        let row_len = SPACES.states * SPACES.observations;
        let off = (s.0 * SPACES.actions + a.0) * row_len;
        (0..row_len)
            .map(|i| Outcome {
                next: StateIndex(i / SPACES.observations),
                observation: ObservationIndex(i % SPACES.observations),
                prob: self.dynamics[off + i],
            })
            .collect()
    }

    fn initial_state_distribution(&self) -> Vec<(StateIndex, F)> {
        self.initial.iter().enumerate().map(|(s, &p)| (StateIndex(s), p)).collect()
    }

    fn prior<R: Rng + ?Sized>(&self, _rng: &mut R) -> CountTable<F> {
        self.prior.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    #[test]
    fn default_rows_are_distributions() {
        let c = Chain::<f64>::default();
        for s in 0..2 {
            for a in 0..2 {
                let out = c.true_dynamics(StateIndex(s), ActionIndex(a));
                assert_eq!(out.len(), 4);
                let total: f64 = out.iter().map(|o| o.prob).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
        assert!(c.prior_table().first_empty_row().is_none());
    }

    #[test]
    fn random_instances_are_valid() {
        let mut rng = seeded(4);
        for _ in 0..20 {
            let c = Chain::<f64>::random(&mut rng);
            let (lo, hi) = c.reward_range();
            assert!(lo >= -1.0 && hi <= 1.0);
            for s in 0..2 {
                for a in 0..2 {
                    let total: f64 = c.true_dynamics(StateIndex(s), ActionIndex(a)).iter().map(|o| o.prob).sum();
                    assert!((total - 1.0).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn rejects_bad_rows() {
        let mut d = vec![0.25f64; 16];
        d[0] = 0.5;
        assert!(Chain::new(d, vec![0.0; 4], vec![1.0; 16], vec![0.5, 0.5]).is_err());
        assert!(Chain::new(vec![0.25f64; 16], vec![0.0; 4], vec![0.0; 16], vec![0.5, 0.5]).is_err());
    }
}

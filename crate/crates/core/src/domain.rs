//! The interface a benchmark domain provides to planners and experiments.

use rand::Rng;

use crate::counts::{CountTable, Layout};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, Spaces, StateIndex};

/// One outcome of the true dynamics with its probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Outcome<F> {
    pub next: StateIndex,
    pub observation: ObservationIndex,
    pub prob: F,
}

/// A finite BA-POMDP domain: true dynamics for the environment, a known
/// reward function and a prior over the dynamics expressed as counts.
pub trait Domain<F: Scalar>: Send + Sync {
    fn spaces(&self) -> Spaces;

    /// Count layout used by this domain's priors.
    fn layout(&self) -> Layout;

    fn reward(&self, s: StateIndex, a: ActionIndex) -> F;

    /// `(min R, max R)` over all state-action pairs.
    fn reward_range(&self) -> (F, F);

    fn is_terminal(&self, _s: StateIndex) -> bool {
        false
    }

    /// Full `(s', z)` distribution of the real environment.
    fn true_dynamics(&self, s: StateIndex, a: ActionIndex) -> Vec<Outcome<F>>;

    /// Steps the real environment.
    fn sample_true<R: Rng + ?Sized>(
        &self,
        s: StateIndex,
        a: ActionIndex,
        rng: &mut R,
    ) -> (StateIndex, ObservationIndex) {
        let outcomes = self.true_dynamics(s, a);
        let mut u = F::sample_unit(rng);
        for o in &outcomes {
            if u < o.prob {
                return (o.next, o.observation);
            }
            u -= o.prob;
        }
        let last = outcomes
            .iter()
            .rev()
            .find(|o| o.prob > F::zero())
            .expect("true dynamics row has positive mass");
        (last.next, last.observation)
    }

    fn initial_state_distribution(&self) -> Vec<(StateIndex, F)>;

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateIndex {
        let dist = self.initial_state_distribution();
        let mut u = F::sample_unit(rng);
        for &(s, p) in &dist {
            if u < p {
                return s;
            }
            u -= p;
        }
        dist.last().expect("nonempty initial distribution").0
    }

    /// Prior counts. Domains with a randomized prior use `rng`.
    fn prior<R: Rng + ?Sized>(&self, rng: &mut R) -> CountTable<F>;
}

/// Exploration constant `h · (max R − min R)`.
pub fn default_exploration<F: Scalar, D: Domain<F>>(domain: &D, horizon: usize) -> F {
    let (lo, hi) = domain.reward_range();
    F::lit(horizon as f64) * (hi - lo)
}

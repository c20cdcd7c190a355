//! The Tiger problem.
//!
//! States: 0 = tiger left, 1 = tiger right. Actions: 0 = listen,
//! 1 = open left, 2 = open right. Observations: 0 = hear left,
//! 1 = hear right.

use rand::Rng;

use crate::counts::{CountTable, Layout};
use crate::domain::{Domain, Outcome};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, Spaces, StateIndex};

pub const TIGER_LEFT: StateIndex = StateIndex(0);
pub const TIGER_RIGHT: StateIndex = StateIndex(1);
pub const LISTEN: ActionIndex = ActionIndex(0);
pub const OPEN_LEFT: ActionIndex = ActionIndex(1);
pub const OPEN_RIGHT: ActionIndex = ActionIndex(2);
pub const HEAR_LEFT: ObservationIndex = ObservationIndex(0);
pub const HEAR_RIGHT: ObservationIndex = ObservationIndex(1);

/// Count mass of a row the agent is certain about.
pub const KNOWN_ROW_MASS: f64 = 1e6;

#[derive(Clone, Debug, PartialEq)]
pub struct Tiger<F> {
    /// Probability that listening reports the correct side.
    pub listen_accuracy: F,
    pub listen_reward: F,
    pub treasure_reward: F,
    pub tiger_reward: F,
    /// Prior counts on hearing the correct side.
    pub prior_correct: F,
    /// Prior counts on hearing the wrong side.
    pub prior_incorrect: F,
}

impl<F: Scalar> Default for Tiger<F> {
    fn default() -> Self {
        Self {
            listen_accuracy: F::lit(0.85),
            listen_reward: F::lit(-1.0),
            treasure_reward: F::lit(10.0),
            tiger_reward: F::lit(-100.0),
            prior_correct: F::lit(5.0),
            prior_incorrect: F::lit(3.0),
        }
    }
}

impl<F: Scalar> Tiger<F> {
    /// Same dynamics, with a prior that already knows the listening accuracy.
    pub fn with_accurate_prior() -> Self {
        let mut t = Self::default();
        t.prior_correct = t.listen_accuracy * F::lit(KNOWN_ROW_MASS);
        t.prior_incorrect = (F::one() - t.listen_accuracy) * F::lit(KNOWN_ROW_MASS);
        t
    }

    fn hear(s: StateIndex) -> ObservationIndex {
        ObservationIndex(s.0)
    }
}

impl<F: Scalar> Domain<F> for Tiger<F> {
    fn spaces(&self) -> Spaces {
        Spaces::new(2, 3, 2)
    }

    fn layout(&self) -> Layout {
        Layout::factored(Domain::<F>::spaces(self))
    }

    fn reward(&self, s: StateIndex, a: ActionIndex) -> F {
        match a {
            LISTEN => self.listen_reward,
            OPEN_LEFT if s == TIGER_LEFT => self.tiger_reward,
            OPEN_RIGHT if s == TIGER_RIGHT => self.tiger_reward,
            _ => self.treasure_reward,
        }
    }

    fn reward_range(&self) -> (F, F) {
        let r = [self.listen_reward, self.treasure_reward, self.tiger_reward];
        let lo = r.iter().copied().fold(F::infinity(), F::min);
        let hi = r.iter().copied().fold(F::neg_infinity(), F::max);
        (lo, hi)
    }

    fn true_dynamics(&self, s: StateIndex, a: ActionIndex) -> Vec<Outcome<F>> {
        if a == LISTEN {
            let wrong = ObservationIndex(1 - s.0);
            return vec![
                Outcome {
                    next: s,
                    observation: Self::hear(s),
                    prob: self.listen_accuracy,
                },
                Outcome {
                    next: s,
                    observation: wrong,
                    prob: F::one() - self.listen_accuracy,
                },
            ];
        }
        let q = F::lit(0.25);
        let mut out = Vec::with_capacity(4);
        for next in [TIGER_LEFT, TIGER_RIGHT] {
            for z in [HEAR_LEFT, HEAR_RIGHT] {
                out.push(Outcome {
                    next,
                    observation: z,
                    prob: q,
                });
            }
        }
        out
    }

    fn initial_state_distribution(&self) -> Vec<(StateIndex, F)> {
        let half = F::lit(0.5);
        vec![(TIGER_LEFT, half), (TIGER_RIGHT, half)]
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, rng: &mut R) -> StateIndex {
        StateIndex(rng.random_range(0..2))
    }

    /// Known transitions and door observations; listening counts
    /// `prior_correct` / `prior_incorrect`.
    fn prior<R: Rng + ?Sized>(&self, _rng: &mut R) -> CountTable<F> {
        let layout = Domain::<F>::layout(self);
        let mut t = CountTable::zeros(layout);
        let known = F::lit(KNOWN_ROW_MASS);
        let half = F::lit(0.5) * known;
        for s in [TIGER_LEFT, TIGER_RIGHT] {
            let row = t.row_mut(layout.transition_row(s, LISTEN));
            row[s.0] = known;
            for a in [OPEN_LEFT, OPEN_RIGHT] {
                t.row_mut(layout.transition_row(s, a)).fill(half);
            }
        }
        for next in [TIGER_LEFT, TIGER_RIGHT] {
            let o = layout.observation_row(LISTEN, next).expect("factored");
            let row = t.row_mut(o);
            row[Self::hear(next).0] = self.prior_correct;
            row[1 - Self::hear(next).0] = self.prior_incorrect;
            for a in [OPEN_LEFT, OPEN_RIGHT] {
                let o = layout.observation_row(a, next).expect("factored");
                t.row_mut(o).fill(half);
            }
        }
        t
    }
}

//! Partially observable sysadmin: keep a network of `n` computers working.
//!
//! A state is a bitmask where bit `i` set means computer `i` is failing.
//! Actions `0..n` ping a computer, `n..2n` reboot one, `2n` does nothing.

use rand::Rng;

use crate::counts::{CountTable, Layout};
use crate::domain::{Domain, Outcome};
use crate::domains::tiger::KNOWN_ROW_MASS;
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, Spaces, StateIndex};

pub const NULL: ObservationIndex = ObservationIndex(0);
pub const FAILING: ObservationIndex = ObservationIndex(1);
pub const WORKING: ObservationIndex = ObservationIndex(2);

pub const PING_COST: f64 = 1.0;
pub const REBOOT_COST: f64 = 20.0;
pub const FAILURE_COST: f64 = 10.0;

/// Largest network the domain accepts.
pub const MAX_COMPUTERS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Action {
    Ping(usize),
    Reboot(usize),
    Nothing,
}

/// Which transition prior [`Sysadmin::prior`] builds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SysadminPrior {
    /// Every true probability moved up or down by `noise`, floored, each row
    /// normalized to `row_total`.
    Noisy,
    /// The true probabilities scaled to the known-row mass.
    Accurate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sysadmin<F> {
    n: usize,
    fail_prob: F,
    pub prior_kind: SysadminPrior,
    pub noise: F,
    pub floor: F,
    pub row_total: F,
}

impl<F: Scalar> Sysadmin<F> {
    /// # Panics
    /// If `n` is 0 or above [`MAX_COMPUTERS`], or `fail_prob` is outside `[0, 1]`.
    pub fn new(n: usize, fail_prob: F) -> Self {
        assert!((1..=MAX_COMPUTERS).contains(&n), "network size {n} out of range");
        assert!(fail_prob >= F::zero() && fail_prob <= F::one(), "failure probability out of range");
        Self {
            n,
            fail_prob,
            prior_kind: SysadminPrior::Noisy,
            noise: F::lit(0.15),
            floor: F::lit(0.001),
            row_total: F::lit(20.0),
        }
    }

    pub fn with_prior(mut self, kind: SysadminPrior) -> Self {
        self.prior_kind = kind;
        self
    }

    pub fn computers(&self) -> usize {
        self.n
    }

    pub fn fail_prob(&self) -> F {
        self.fail_prob
    }

    pub fn decode(&self, a: ActionIndex) -> Action {
        let n = self.n;
        match a.0 {
            i if i < n => Action::Ping(i),
            i if i < 2 * n => Action::Reboot(i - n),
            i if i == 2 * n => Action::Nothing,
            _ => panic!("action {a} out of range"),
        }
    }

    pub fn encode(&self, action: Action) -> ActionIndex {
        ActionIndex(match action {
            Action::Ping(i) => i,
            Action::Reboot(i) => self.n + i,
            Action::Nothing => 2 * self.n,
        })
    }

    pub fn failing(s: StateIndex) -> u32 {
        (s.0 as u64).count_ones()
    }

    /// Probability of `next` after failures in `s` and the action's reboot.
    fn transition_prob(&self, s: StateIndex, a: ActionIndex, next: StateIndex) -> F {
        let mut p = F::one();
        let rebooted = match self.decode(a) {
            Action::Reboot(i) => Some(i),
            _ => None,
        };
        for i in 0..self.n {
            let bit = 1usize << i;
            let was_failing = s.0 & bit != 0;
            let now_failing = next.0 & bit != 0;
            if rebooted == Some(i) {
                if now_failing {
                    return F::zero();
                }
                continue;
            }
            p *= match (was_failing, now_failing) {
                (true, true) => F::one(),
                (true, false) => F::zero(),
                (false, true) => self.fail_prob,
                (false, false) => F::one() - self.fail_prob,
            };
            if p == F::zero() {
                return p;
            }
        }
        p
    }

    /// True transition probabilities of `(s, a)`, each moved up or down by
    /// `noise` with equal chance; results at or below zero become `floor`.
    pub fn noisy_row<R: Rng + ?Sized>(&self, s: StateIndex, a: ActionIndex, rng: &mut R) -> Vec<F> {
        (0..1usize << self.n)
            .map(|next| {
                let p = self.transition_prob(s, a, StateIndex(next));
                let moved = if rng.random_bool(0.5) { p + self.noise } else { p - self.noise };
                if moved <= F::zero() {
                    self.floor
                } else {
                    moved
                }
            })
            .collect()
    }

    fn observe(&self, a: ActionIndex, next: StateIndex) -> ObservationIndex {
        match self.decode(a) {
            Action::Ping(i) if next.0 & (1 << i) != 0 => FAILING,
            Action::Ping(_) => WORKING,
            _ => NULL,
        }
    }
}

impl<F: Scalar> Domain<F> for Sysadmin<F> {
    fn spaces(&self) -> Spaces {
        Spaces::new(1 << self.n, 2 * self.n + 1, 3)
    }

    fn layout(&self) -> Layout {
        Layout::factored(Domain::<F>::spaces(self))
    }

    fn reward(&self, s: StateIndex, a: ActionIndex) -> F {
        let action_cost = match self.decode(a) {
            Action::Ping(_) => PING_COST,
            Action::Reboot(_) => REBOOT_COST,
            Action::Nothing => 0.0,
        };
        -F::lit(action_cost + FAILURE_COST * Self::failing(s) as f64)
    }

    fn reward_range(&self) -> (F, F) {
        (-F::lit(REBOOT_COST + FAILURE_COST * self.n as f64), F::zero())
    }

    fn true_dynamics(&self, s: StateIndex, a: ActionIndex) -> Vec<Outcome<F>> {
        (0..1usize << self.n)
            .map(StateIndex)
            .filter_map(|next| {
                let prob = self.transition_prob(s, a, next);
                (prob > F::zero()).then(|| Outcome {
                    next,
                    observation: self.observe(a, next),
                    prob,
                })
            })
            .collect()
    }

    fn sample_true<R: Rng + ?Sized>(&self, s: StateIndex, a: ActionIndex, rng: &mut R) -> (StateIndex, ObservationIndex) {
        let mut next = s.0;
        for i in 0..self.n {
            if next & (1 << i) == 0 && F::sample_unit(rng) < self.fail_prob {
                next |= 1 << i;
            }
        }
        if let Action::Reboot(i) = self.decode(a) {
            next &= !(1 << i);
        }
        let next = StateIndex(next);
        (next, self.observe(a, next))
    }

    /// All computers working.
    fn initial_state_distribution(&self) -> Vec<(StateIndex, F)> {
        vec![(StateIndex(0), F::one())]
    }

    fn sample_initial_state<R: Rng + ?Sized>(&self, _rng: &mut R) -> StateIndex {
        StateIndex(0)
    }

    fn prior<R: Rng + ?Sized>(&self, rng: &mut R) -> CountTable<F> {
        let layout = Domain::<F>::layout(self);
        let spaces = layout.spaces();
        let mut t = CountTable::zeros(layout);
        let known = F::lit(KNOWN_ROW_MASS);
        for s in (0..spaces.states).map(StateIndex) {
            for a in (0..spaces.actions).map(ActionIndex) {
                let raw = match self.prior_kind {
                    SysadminPrior::Accurate => (0..spaces.states)
                        .map(|next| self.transition_prob(s, a, StateIndex(next)))
                        .collect(),
                    SysadminPrior::Noisy => self.noisy_row(s, a, rng),
                };
                let row = t.row_mut(layout.transition_row(s, a));
                row.copy_from_slice(&raw);
                let total: F = row.iter().copied().sum();
                let scale = match self.prior_kind {
                    SysadminPrior::Accurate => known / total,
                    SysadminPrior::Noisy => self.row_total / total,
                };
                row.iter_mut().for_each(|c| *c *= scale);
            }
        }
        for a in (0..spaces.actions).map(ActionIndex) {
            for next in (0..spaces.states).map(StateIndex) {
                let o = layout.observation_row(a, next).expect("factored");
                t.row_mut(o)[self.observe(a, next).0] = known;
            }
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counts::{expected_prob, RowId};
    use crate::rng::seeded;

    #[test]
    fn sizes() {
        let d = Sysadmin::<f64>::new(3, 0.1);
        assert_eq!(d.spaces(), Spaces::new(8, 7, 3));
        assert_eq!(d.layout().num_rows(), 2 * 56);
        assert_eq!(d.layout().row_span(RowId(0)).1, 8);
        // 6 computers: 64·13·64 transition + 13·64·3 observation counts
        assert_eq!(Domain::<f64>::layout(&Sysadmin::new(6, 0.05)).len(), 55_744);
    }

    #[test]
    fn action_encoding_round_trips() {
        let d = Sysadmin::<f64>::new(4, 0.1);
        for a in 0..9 {
            assert_eq!(d.encode(d.decode(ActionIndex(a))), ActionIndex(a));
        }
        assert_eq!(d.decode(ActionIndex(8)), Action::Nothing);
    }

    #[test]
    fn single_computer_fails_with_probability_f() {
        let d = Sysadmin::<f64>::new(1, 0.1);
        let out = d.true_dynamics(StateIndex(0), d.encode(Action::Nothing));
        let failing: f64 = out.iter().filter(|o| o.next == StateIndex(1)).map(|o| o.prob).sum();
        assert!((failing - 0.1).abs() < 1e-12);
    }

    #[test]
    fn zero_failure_rate_is_deterministic() {
        let d = Sysadmin::<f64>::new(3, 0.0);
        for s in 0..8 {
            for a in 0..7 {
                let out = d.true_dynamics(StateIndex(s), ActionIndex(a));
                assert_eq!(out.len(), 1);
            }
        }
        let out = d.true_dynamics(StateIndex(0b101), d.encode(Action::Reboot(2)));
        assert_eq!(out[0].next, StateIndex(0b001));
    }

    #[test]
    fn rebooted_computer_always_works() {
        let d = Sysadmin::<f64>::new(3, 0.9);
        for s in 0..8 {
            for i in 0..3 {
                for o in d.true_dynamics(StateIndex(s), d.encode(Action::Reboot(i))) {
                    assert_eq!(o.next.0 & (1 << i), 0);
                }
            }
        }
    }

    #[test]
    fn ping_observes_post_transition_state() {
        let d = Sysadmin::<f64>::new(2, 0.3);
        for o in d.true_dynamics(StateIndex(0), d.encode(Action::Ping(1))) {
            let expect = if o.next.0 & 2 != 0 { FAILING } else { WORKING };
            assert_eq!(o.observation, expect);
        }
        let out = d.true_dynamics(StateIndex(0), d.encode(Action::Ping(0)));
        let working: f64 = out.iter().filter(|o| o.observation == WORKING).map(|o| o.prob).sum();
        assert!((working - 0.7).abs() < 1e-12);
    }

    #[test]
    fn rows_are_distributions() {
        let d = Sysadmin::<f64>::new(3, 0.1);
        for s in 0..8 {
            for a in 0..7 {
                let out = d.true_dynamics(StateIndex(s), ActionIndex(a));
                assert!(out.iter().all(|o| o.prob >= 0.0));
                let total: f64 = out.iter().map(|o| o.prob).sum();
                assert!((total - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sampled_environment_matches_dynamics() {
        let d = Sysadmin::<f64>::new(2, 0.2);
        let mut rng = seeded(11);
        let n = 100_000;
        let both = (0..n)
            .filter(|_| d.sample_true(StateIndex(0), d.encode(Action::Nothing), &mut rng).0 == StateIndex(3))
            .count();
        assert!((both as f64 / n as f64 - 0.04).abs() < 0.003);
    }

    #[test]
    fn rewards() {
        let d = Sysadmin::<f64>::new(3, 0.1);
        assert_eq!(d.reward(StateIndex(0), d.encode(Action::Nothing)), 0.0);
        assert_eq!(d.reward(StateIndex(0b011), d.encode(Action::Ping(2))), -21.0);
        assert_eq!(d.reward(StateIndex(0b100), d.encode(Action::Reboot(2))), -30.0);
        assert_eq!(d.reward_range(), (-50.0, 0.0));
    }

    #[test]
    fn noisy_prior_rows_sum_to_twenty() {
        let d = Sysadmin::<f64>::new(3, 0.1);
        let prior = d.prior(&mut seeded(5));
        let layout = d.layout();
        for r in 0..56 {
            let total: f64 = prior.row(RowId(r)).iter().sum();
            assert!((total - 20.0).abs() < 1e-9, "row {r}: {total}");
            assert_eq!(prior.row(RowId(r)).len(), 8);
        }
        // observation rows are certain
        for a in 0..7 {
            for next in 0..8 {
                let o = layout.observation_row(ActionIndex(a), StateIndex(next)).unwrap();
                assert_eq!(prior.row(o).iter().sum::<f64>(), KNOWN_ROW_MASS);
            }
        }
        assert!(prior.first_empty_row().is_none());
    }

    #[test]
    fn noisy_entries_move_by_noise_or_hit_the_floor() {
        let d = Sysadmin::<f64>::new(2, 0.1);
        let mut rng = seeded(7);
        for s in (0..4).map(StateIndex) {
            for a in (0..5).map(ActionIndex) {
                let raw = d.noisy_row(s, a, &mut rng);
                for (next, c) in raw.into_iter().enumerate() {
                    let p = d.transition_prob(s, a, StateIndex(next));
                    let ok = (c - (p + 0.15)).abs() < 1e-12
                        || (c - (p - 0.15)).abs() < 1e-12
                        || (p - 0.15 <= 0.0 && c == 0.001);
                    assert!(ok, "p={p} c={c}");
                }
            }
        }
    }

    #[test]
    fn true_zero_entries_are_floored() {
        // from failing with do-nothing, P(working) = 0
        let d = Sysadmin::<f64>::new(1, 0.1);
        let mut seen = [false; 2];
        let mut rng = seeded(3);
        for _ in 0..64 {
            let c = d.noisy_row(StateIndex(1), ActionIndex(2), &mut rng)[0];
            if c == 0.001 {
                seen[0] = true;
            } else {
                assert!((c - 0.15).abs() < 1e-12);
                seen[1] = true;
            }
        }
        assert_eq!(seen, [true, true]);
    }

    #[test]
    fn prior_is_reproducible() {
        let d = Sysadmin::<f64>::new(3, 0.1);
        assert_eq!(d.prior(&mut seeded(9)), d.prior(&mut seeded(9)));
        assert_ne!(d.prior(&mut seeded(9)), d.prior(&mut seeded(10)));
    }

    #[test]
    fn accurate_prior_matches_truth() {
        let d = Sysadmin::<f64>::new(2, 0.1).with_prior(SysadminPrior::Accurate);
        let prior = d.prior(&mut seeded(1));
        for s in 0..4 {
            for a in 0..5 {
                for o in d.true_dynamics(StateIndex(s), ActionIndex(a)) {
                    let p = expected_prob(&prior, StateIndex(s), ActionIndex(a), o.next, o.observation).unwrap();
                    assert!((p - o.prob).abs() < 1e-9);
                }
            }
        }
    }
}

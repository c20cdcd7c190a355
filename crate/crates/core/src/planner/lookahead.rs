//! Depth-`d` expectimax over the particle belief with observations expanded
//! exactly under the expected model.

use rand::Rng;

use crate::belief::{Delta, Particle, ParticleFilter};
use crate::counts::{CountView, Factorization, Layout, RowId};
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::planner::tree::argmax_random;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};

/// One weighted hypothesis: a belief particle plus the increments along the
/// imagined path from it.
struct Hypothesis<'a, P, F> {
    root: &'a P,
    path: Delta<F>,
    state: StateIndex,
    weight: F,
}

impl<F: Scalar, P: CountView<F>> CountView<F> for Hypothesis<'_, P, F> {
    fn layout(&self) -> Layout {
        self.root.layout()
    }

    fn count(&self, flat: usize) -> F {
        self.root.count(flat) + self.path.get(flat)
    }

    fn row_total(&self, row: RowId) -> F {
        let (off, len) = self.layout().row_span(row);
        let extra: F = self.path.range(off, off + len).iter().map(|e| e.1).sum();
        self.root.row_total(row) + extra
    }

    fn with_row<T>(&self, row: RowId, scratch: &mut Vec<F>, f: impl FnOnce(&[F]) -> T) -> T {
        let (off, len) = self.layout().row_span(row);
        let extra = self.path.range(off, off + len);
        if extra.is_empty() {
            return self.root.with_row(row, scratch, f);
        }
        let mut own = Vec::with_capacity(len);
        self.root.with_row(row, scratch, |r| own.extend_from_slice(r));
        for &(flat, amount) in extra {
            own[flat - off] += amount;
        }
        f(&own)
    }
}

/// Appends every `(s', z, D_χ(s', z | s, a))` with positive probability.
fn expected_outcomes<F: Scalar, V: CountView<F>>(
    view: &V,
    s: StateIndex,
    a: ActionIndex,
    scratch: &mut Vec<F>,
    out: &mut Vec<(StateIndex, ObservationIndex, F)>,
) -> Result<()> {
    let layout = view.layout();
    let spaces = layout.spaces();
    let t_row = layout.transition_row(s, a);
    let t: Vec<F> = view.with_row(t_row, scratch, |r| r.to_vec());
    let t_total: F = t.iter().copied().sum();
    if !(t_total > F::zero()) {
        return Err(Error::ZeroRowTotal { row: t_row.0 });
    }
    match layout.kind() {
        Factorization::Joint => {
            for (i, &c) in t.iter().enumerate() {
                if c > F::zero() {
                    let (next, z) = (i / spaces.observations, i % spaces.observations);
                    out.push((StateIndex(next), ObservationIndex(z), c / t_total));
                }
            }
        }
        Factorization::Factored => {
            for (next, &c) in t.iter().enumerate() {
                if !(c > F::zero()) {
                    continue;
                }
                let next = StateIndex(next);
                let o_row = layout.observation_row(a, next).expect("factored");
                let pt = c / t_total;
                view.with_row(o_row, scratch, |o| {
                    let o_total: F = o.iter().copied().sum();
                    if !(o_total > F::zero()) {
                        return Err(Error::ZeroRowTotal { row: o_row.0 });
                    }
                    for (z, &oc) in o.iter().enumerate() {
                        if oc > F::zero() {
                            out.push((next, ObservationIndex(z), pt * oc / o_total));
                        }
                    }
                    Ok(())
                })?;
            }
        }
    }
    Ok(())
}

struct Lookahead<'d, D, F> {
    domain: &'d D,
    discount: F,
    scratch: Vec<F>,
    outcomes: Vec<(StateIndex, ObservationIndex, F)>,
}

impl<D: Domain<F>, F: Scalar> Lookahead<'_, D, F> {
    /// Unnormalized action value: scales linearly with the hypothesis weights.
    fn q<P: CountView<F>>(&mut self, hyps: &[Hypothesis<'_, P, F>], a: ActionIndex, depth: usize) -> Result<F> {
        let mut value = F::zero();
        for h in hyps {
            value += h.weight * self.domain.reward(h.state, a);
        }
        if depth <= 1 {
            return Ok(value);
        }
        let spaces = self.domain.spaces();
        let mut children: Vec<Vec<Hypothesis<'_, P, F>>> = (0..spaces.observations).map(|_| Vec::new()).collect();
        for h in hyps {
            if self.domain.is_terminal(h.state) {
                continue;
            }
            self.outcomes.clear();
            let mut outcomes = std::mem::take(&mut self.outcomes);
            expected_outcomes(h, h.state, a, &mut self.scratch, &mut outcomes)?;
            let layout = h.layout();
            for &(next, z, p) in &outcomes {
                let mut path = h.path.clone();
                for &flat in layout.touched(h.state, a, next, z).as_slice() {
                    path.add(flat, F::one());
                }
                children[z.0].push(Hypothesis {
                    root: h.root,
                    path,
                    state: next,
                    weight: h.weight * p,
                });
            }
            self.outcomes = outcomes;
        }
        for child in &children {
            if !child.is_empty() {
                value += self.discount * self.v(child, depth - 1)?;
            }
        }
        Ok(value)
    }

    fn v<P: CountView<F>>(&mut self, hyps: &[Hypothesis<'_, P, F>], depth: usize) -> Result<F> {
        let mut best = F::neg_infinity();
        for a in 0..self.domain.spaces().actions {
            let q = self.q(hyps, ActionIndex(a), depth)?;
            if q > best {
                best = q;
            }
        }
        Ok(best)
    }
}

/// Expected discounted return of each first action followed by optimal
/// play, `depth` steps deep, with leaf value 0.
pub fn lookahead_values<F, D, P>(domain: &D, belief: &ParticleFilter<P>, depth: usize, discount: F) -> Result<Vec<F>>
where
    F: Scalar,
    D: Domain<F>,
    P: Particle<F>,
{
    if depth == 0 {
        return Err(Error::InvalidConfig("lookahead depth must be at least 1".into()));
    }
    if belief.is_empty() {
        return Err(Error::EmptyBelief);
    }
    let w = F::one() / F::lit(belief.len() as f64);
    let hyps: Vec<_> = belief
        .iter()
        .map(|p| Hypothesis {
            root: p,
            path: Delta::new(),
            state: p.state(),
            weight: w,
        })
        .collect();
    let mut search = Lookahead {
        domain,
        discount,
        scratch: Vec::new(),
        outcomes: Vec::new(),
    };
    (0..domain.spaces().actions)
        .map(|a| search.q(&hyps, ActionIndex(a), depth))
        .collect()
}

/// Argmax of [`lookahead_values`], ties broken uniformly at random.
pub fn lookahead_plan<F, D, P, R>(
    domain: &D,
    belief: &ParticleFilter<P>,
    depth: usize,
    discount: F,
    rng: &mut R,
) -> Result<ActionIndex>
where
    F: Scalar,
    D: Domain<F>,
    P: Particle<F>,
    R: Rng + ?Sized,
{
    let values = lookahead_values(domain, belief, depth, discount)?;
    argmax_random(values.into_iter(), rng)
        .map(ActionIndex)
        .ok_or(Error::NoVisitedActions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::AugmentedState;
    use crate::domains::tiger::{self, Tiger};
    use crate::domains::Chain;
    use crate::oracle::{brute_force_expectimax, EnumeratedBelief};
    use crate::rng::seeded;

    #[test]
    fn depth_one_opens_the_safe_door() {
        let t = Tiger::<f64>::with_accurate_prior();
        let prior = t.prior(&mut seeded(0));
        let b = ParticleFilter::new(vec![AugmentedState::new(tiger::TIGER_LEFT, prior)]);
        assert_eq!(lookahead_values(&t, &b, 1, 0.95).unwrap(), vec![-1.0, -100.0, 10.0]);
        assert_eq!(lookahead_plan(&t, &b, 1, 0.95, &mut seeded(1)).unwrap(), tiger::OPEN_RIGHT);
    }

    #[test]
    fn equal_values_tie_uniformly() {
        let c = Chain::<f64>::default().with_rewards(vec![0.0; 4]);
        let prior = c.prior(&mut seeded(0));
        let b = ParticleFilter::new(vec![AugmentedState::new(StateIndex(0), prior)]);
        let mut rng = seeded(2);
        let n = 4000;
        let zeros = (0..n)
            .filter(|_| lookahead_plan(&c, &b, 1, 0.9, &mut rng).unwrap() == ActionIndex(0))
            .count();
        assert!((zeros as f64 / n as f64 - 0.5).abs() < 0.03);
    }

    #[test]
    fn matches_brute_force_on_random_chains() {
        let mut rng = seeded(3);
        for _ in 0..20 {
            let c = Chain::<f64>::random(&mut rng);
            let prior = c.prior(&mut rng);
            let b = ParticleFilter::plain_from_prior(&prior, 7, |r: &mut _| c.sample_initial_state(r), &mut rng);
            let exact = EnumeratedBelief::from_particles(&b).unwrap();
            for depth in 1..=3 {
                let ours = lookahead_values(&c, &b, depth, 0.9).unwrap();
                let theirs = brute_force_expectimax(&c, &exact, depth, 0.9).unwrap();
                for (x, y) in ours.iter().zip(&theirs) {
                    assert!((x - y).abs() < 1e-9, "depth {depth}: {ours:?} vs {theirs:?}");
                }
            }
        }
    }

    #[test]
    fn zero_depth_rejected() {
        let t = Tiger::<f64>::default();
        let prior = t.prior(&mut seeded(0));
        let b = ParticleFilter::new(vec![AugmentedState::new(tiger::TIGER_LEFT, prior)]);
        assert!(lookahead_values(&t, &b, 0, 0.95).is_err());
    }
}

//! Full simulated histories and their probabilities under a fixed rollout
//! policy.

use std::collections::BTreeMap;

use rand::Rng;

use crate::belief::{AugmentedState, Particle};
use crate::counts::{expected_prob, CountTable, CountView, Layout};
use crate::error::{Error, Result};
use crate::model::SampledModel;
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};
use crate::step::{step_counting, step_root_sampled, StepBuffers, StepKind};

/// One `(a_t, s_{t+1}, z_{t+1})` triple.
pub type HistoryStep = (ActionIndex, StateIndex, ObservationIndex);

/// `H_d`: a start state and counts plus the steps simulated from them.
#[derive(Clone, Debug, PartialEq)]
pub struct FullHistory<F> {
    pub start: StateIndex,
    pub counts: CountTable<F>,
    pub steps: Vec<HistoryStep>,
}

impl<F: Scalar> FullHistory<F> {
    pub fn new(start: StateIndex, counts: CountTable<F>, steps: Vec<HistoryStep>) -> Self {
        Self { start, counts, steps }
    }

    pub fn depth(&self) -> usize {
        self.steps.len()
    }

    /// `χ(H_t) = χ₀ + Δ(H_t)`.
    pub fn counts_at(&self, t: usize) -> CountTable<F> {
        let mut c = self.counts.clone();
        let mut s = self.start;
        for &(a, next, z) in &self.steps[..t] {
            c.increment(s, a, next, z);
            s = next;
        }
        c
    }

    /// Action-observation history `h_t`.
    pub fn observable_prefix(&self, t: usize) -> Vec<(ActionIndex, ObservationIndex)> {
        self.steps[..t].iter().map(|&(a, _, z)| (a, z)).collect()
    }
}

/// A rollout policy over action-observation histories.
pub trait RolloutPolicy<F: Scalar> {
    fn prob(&self, history: &[(ActionIndex, ObservationIndex)], a: ActionIndex) -> F;

    fn sample<R: Rng + ?Sized>(&self, history: &[(ActionIndex, ObservationIndex)], rng: &mut R) -> ActionIndex;
}

/// Picks every action with equal probability.
#[derive(Clone, Copy, Debug)]
pub struct UniformPolicy {
    pub actions: usize,
}

impl<F: Scalar> RolloutPolicy<F> for UniformPolicy {
    fn prob(&self, _history: &[(ActionIndex, ObservationIndex)], _a: ActionIndex) -> F {
        F::one() / F::lit(self.actions as f64)
    }

    fn sample<R: Rng + ?Sized>(&self, _history: &[(ActionIndex, ObservationIndex)], rng: &mut R) -> ActionIndex {
        ActionIndex(rng.random_range(0..self.actions))
    }
}

/// `log B(α) = log Γ(Σα) − Σ log Γ(α_i)` over the positive entries.
pub fn log_dirichlet_normalizer<F: Scalar>(alpha: &[F]) -> Result<F> {
    let mut total = F::zero();
    let mut sum_ln = F::zero();
    for &x in alpha {
        if x < F::zero() || x.is_nan() {
            return Err(Error::NonPositiveCount { value: x.to_f64_lossy() });
        }
        if x > F::zero() {
            total += x;
            sum_ln += x.lgamma();
        }
    }
    if !(total > F::zero()) {
        return Err(Error::EmptyDirichlet);
    }
    Ok(total.lgamma() - sum_ln)
}

fn policy_log_prob<F: Scalar, P: RolloutPolicy<F>>(h: &FullHistory<F>, policy: &P) -> Option<F> {
    let mut lp = F::zero();
    for (t, &(a, _, _)) in h.steps.iter().enumerate() {
        let p = policy.prob(&h.observable_prefix(t), a);
        if !(p > F::zero()) {
            return None;
        }
        lp += p.ln();
    }
    Some(lp)
}

/// `Π_t π(a_t | h_t) · Π_{sa} B(χ_sa(H₀)) / B(χ_sa(H_d))`, evaluated in log
/// space. Histories that use an outcome with zero prior count have
/// probability 0.
pub fn closed_form_history_prob<F: Scalar, P: RolloutPolicy<F>>(h: &FullHistory<F>, policy: &P) -> Result<F> {
    let layout = h.counts.layout();
    if let Some(row) = h.counts.first_empty_row() {
        return Err(Error::ZeroRowTotal { row: row.0 });
    }
    let Some(mut log_p) = policy_log_prob(h, policy) else {
        return Ok(F::zero());
    };
    let mut s = h.start;
    let mut rows = Vec::new();
    for &(a, next, z) in &h.steps {
        for &flat in layout.touched(s, a, next, z).as_slice() {
            if !(h.counts.count(flat) > F::zero()) {
                return Ok(F::zero());
            }
            rows.push(layout.row_of(flat));
        }
        s = next;
    }
    rows.sort_unstable();
    rows.dedup();
    let end = h.counts_at(h.depth());
    for row in rows {
        log_p += log_dirichlet_normalizer(h.counts.row(row))? - log_dirichlet_normalizer(end.row(row))?;
    }
    Ok(log_p.exp())
}

/// `Π_t π(a_t | h_t) · D_{χ(H_t)}(s_{t+1}, z_{t+1} | s_t, a_t)`, updating the
/// counts after every step.
pub fn sequential_history_prob<F: Scalar, P: RolloutPolicy<F>>(h: &FullHistory<F>, policy: &P) -> Result<F> {
    let mut counts = h.counts.clone();
    let mut s = h.start;
    let mut p = F::one();
    for (t, &(a, next, z)) in h.steps.iter().enumerate() {
        p *= policy.prob(&h.observable_prefix(t), a) * expected_prob(&counts, s, a, next, z)?;
        if p == F::zero() {
            return Ok(p);
        }
        counts.increment(s, a, next, z);
        s = next;
    }
    Ok(p)
}

/// Every step sequence of length `depth` over the layout's spaces.
pub fn enumerate_histories(layout: Layout, depth: usize) -> Vec<Vec<HistoryStep>> {
    let sp = layout.spaces();
    let mut out: Vec<Vec<HistoryStep>> = vec![Vec::new()];
    for _ in 0..depth {
        let mut next_out = Vec::with_capacity(out.len() * sp.actions * sp.states * sp.observations);
        for prefix in &out {
            for a in 0..sp.actions {
                for s in 0..sp.states {
                    for z in 0..sp.observations {
                        let mut h = prefix.clone();
                        h.push((ActionIndex(a), StateIndex(s), ObservationIndex(z)));
                        next_out.push(h);
                    }
                }
            }
        }
        out = next_out;
    }
    out
}

/// How simulated histories are generated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RolloutKind {
    /// One `Ḋ ~ Dir(χ₀)` per simulation, no count updates.
    RootSampled,
    /// Expected model, counts updated after every step.
    Expected,
    /// Fresh Dirichlet draw per step, counts updated after every step.
    Dirichlet,
}

/// Distribution over full histories as a map from step sequence to
/// probability.
pub type HistoryDistribution<F> = BTreeMap<Vec<HistoryStep>, F>;

/// Runs `num_sims` independent depth-`depth` simulations from `(s₀, χ₀)`
/// and returns the empirical frequency of each full history.
pub fn empirical_rollout_distribution<F, P, R>(
    kind: RolloutKind,
    policy: &P,
    counts: &CountTable<F>,
    start: StateIndex,
    depth: usize,
    num_sims: usize,
    rng: &mut R,
) -> Result<HistoryDistribution<F>>
where
    F: Scalar,
    P: RolloutPolicy<F>,
    R: Rng + ?Sized,
{
    let mut tally: BTreeMap<Vec<HistoryStep>, usize> = BTreeMap::new();
    let mut model = SampledModel::lazy(counts.layout());
    let mut bufs = StepBuffers::new();
    let mut steps = Vec::with_capacity(depth);
    let mut observable = Vec::with_capacity(depth);
    for _ in 0..num_sims {
        steps.clear();
        observable.clear();
        match kind {
            RolloutKind::RootSampled => {
                model.reset(counts.layout());
                let mut s = start;
                for _ in 0..depth {
                    let a = policy.sample(&observable, rng);
                    let z = step_root_sampled(&mut s, counts, &mut model, a, rng, &mut bufs.scratch)?;
                    steps.push((a, s, z));
                    observable.push((a, z));
                }
            }
            RolloutKind::Expected | RolloutKind::Dirichlet => {
                let step = if kind == RolloutKind::Expected {
                    StepKind::Expected
                } else {
                    StepKind::Dirichlet
                };
                let mut particle = AugmentedState::new(start, counts.clone());
                for _ in 0..depth {
                    let a = policy.sample(&observable, rng);
                    let z = step_counting(&mut particle, a, step, rng, &mut bufs)?;
                    steps.push((a, particle.state(), z));
                    observable.push((a, z));
                }
            }
        }
        *tally.entry(steps.clone()).or_default() += 1;
    }
    let n = F::lit(num_sims as f64);
    Ok(tally
        .into_iter()
        .map(|(h, c)| (h, F::lit(c as f64) / n))
        .collect())
}

/// Exact distribution over all depth-`depth` histories under `prob`.
pub fn exact_history_distribution<F: Scalar>(
    counts: &CountTable<F>,
    start: StateIndex,
    depth: usize,
    mut prob: impl FnMut(&FullHistory<F>) -> Result<F>,
) -> Result<HistoryDistribution<F>> {
    let mut out = BTreeMap::new();
    for steps in enumerate_histories(counts.layout(), depth) {
        let h = FullHistory::new(start, counts.clone(), steps);
        let p = prob(&h)?;
        if p > F::zero() {
            out.insert(h.steps, p);
        }
    }
    Ok(out)
}

/// Half the L1 distance between two distributions over the same keys.
pub fn tv_distance<K: Ord, F: Scalar>(p: &BTreeMap<K, F>, q: &BTreeMap<K, F>) -> F {
    let mut sum = F::zero();
    for (k, &pv) in p {
        sum += (pv - q.get(k).copied().unwrap_or(F::zero())).abs();
    }
    for (k, &qv) in q {
        if !p.contains_key(k) {
            sum += qv.abs();
        }
    }
    sum / F::lit(2.0)
}

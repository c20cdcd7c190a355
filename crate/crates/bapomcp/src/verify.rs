//! Oracle suite: sampled quantities against their exact references.

use std::fmt;

use bapomcp_core::belief::{ParticleFilter, RejectionConfig};
use bapomcp_core::domains::tiger::{self, Tiger};
use bapomcp_core::domains::Chain;
use bapomcp_core::oracle::{
    brute_force_expectimax, closed_form_history_prob, empirical_rollout_distribution, enumerate_histories,
    exact_belief_update, exact_history_distribution, sequential_history_prob, tv_distance, EnumeratedBelief,
    FullHistory, RolloutKind, UniformPolicy,
};
use bapomcp_core::planner::lookahead_values;
use bapomcp_core::rng::{stream, Purpose};
use bapomcp_core::space::{ActionIndex, ObservationIndex, StateIndex};
use bapomcp_core::{CountTable, Domain, Result, StepKind};
use rand::Rng;

/// Total-variation budget for `10^5` samples over at most 512 histories.
pub const TV_TOLERANCE: f64 = 0.02;
pub const IDENTITY_TOLERANCE: f64 = 1e-12;
pub const ACCEPTANCE_TOLERANCE: f64 = 0.02;
pub const VALUE_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    fn at_most(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
            passed: measured <= tolerance,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {:<52} measured {:.3e}  tolerance {:.1e}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.measured,
            self.tolerance
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub seed: u64,
    pub samples: usize,
    pub depth: usize,
    pub random_tables: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            samples: 100_000,
            depth: 3,
            random_tables: 1000,
        }
    }
}

const CHAIN_POLICY: UniformPolicy = UniformPolicy { actions: 2 };

/// TV between sampled and exact depth-`depth` history distributions on the
/// default chain instance from state 0.
pub fn rollout_tv(kind: RolloutKind, cfg: &SuiteConfig) -> Result<f64> {
    let chain = Chain::<f64>::default();
    let counts = chain.prior_table().clone();
    let start = StateIndex(0);
    let mut rng = stream(cfg.seed, Purpose::Oracle, &[1, kind as u64]);
    let empirical =
        empirical_rollout_distribution(kind, &CHAIN_POLICY, &counts, start, cfg.depth, cfg.samples, &mut rng)?;
    let exact = match kind {
        RolloutKind::RootSampled => exact_history_distribution(&counts, start, cfg.depth, |h| {
            closed_form_history_prob(h, &CHAIN_POLICY)
        })?,
        _ => exact_history_distribution(&counts, start, cfg.depth, |h| sequential_history_prob(h, &CHAIN_POLICY))?,
    };
    Ok(tv_distance(&empirical, &exact))
}

fn relative_error(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}

/// Largest relative gap between the closed form and the sequential product
/// over every chain history of depth 0 to 4.
pub fn identity_exhaustive_error() -> Result<f64> {
    let chain = Chain::<f64>::default();
    let counts = chain.prior_table();
    let mut worst = 0.0f64;
    for depth in 0..=4 {
        for start in 0..2 {
            for steps in enumerate_histories(Chain::<f64>::layout(), depth) {
                let h = FullHistory::new(StateIndex(start), counts.clone(), steps);
                let a = closed_form_history_prob(&h, &CHAIN_POLICY)?;
                let b = sequential_history_prob(&h, &CHAIN_POLICY)?;
                worst = worst.max(relative_error(a, b));
            }
        }
    }
    Ok(worst)
}

/// As [`identity_exhaustive_error`] but over random count tables, each with a
/// random depth-1..=4 history.
pub fn identity_random_error(cfg: &SuiteConfig) -> Result<f64> {
    let layout = Chain::<f64>::layout();
    let mut rng = stream(cfg.seed, Purpose::Oracle, &[2]);
    let mut worst = 0.0f64;
    for _ in 0..cfg.random_tables {
        let values = (0..layout.len()).map(|_| rng.random_range(0.05..50.0)).collect();
        let counts = CountTable::from_vec(layout, values)?;
        let depth = rng.random_range(1..=4);
        let steps = (0..depth)
            .map(|_| {
                (
                    ActionIndex(rng.random_range(0..2)),
                    StateIndex(rng.random_range(0..2)),
                    ObservationIndex(rng.random_range(0..2)),
                )
            })
            .collect();
        let h = FullHistory::new(StateIndex(rng.random_range(0..2)), counts, steps);
        let a = closed_form_history_prob(&h, &CHAIN_POLICY)?;
        let b = sequential_history_prob(&h, &CHAIN_POLICY)?;
        worst = worst.max(relative_error(a, b));
    }
    Ok(worst)
}

/// Largest deviation from 1 of the total probability of all depth-`d`
/// histories, `d` in 0..=4, under either formula.
pub fn history_mass_error() -> Result<f64> {
    let counts = Chain::<f64>::default().prior_table().clone();
    let mut worst = 0.0f64;
    for depth in 0..=4 {
        let cf = exact_history_distribution(&counts, StateIndex(1), depth, |h| {
            closed_form_history_prob(h, &CHAIN_POLICY)
        })?;
        let sq = exact_history_distribution(&counts, StateIndex(1), depth, |h| sequential_history_prob(h, &CHAIN_POLICY))?;
        worst = worst.max((cf.values().sum::<f64>() - 1.0).abs());
        worst = worst.max((sq.values().sum::<f64>() - 1.0).abs());
    }
    Ok(worst)
}

/// Result of comparing a particle update sequence against exact Bayes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeliefComparison {
    pub tv: f64,
    /// Largest gap between an update's acceptance rate and the exact
    /// observation likelihood.
    pub acceptance_gap: f64,
}

/// Runs `updates` through a `k`-particle filter and the exact enumerated
/// belief, starting from the domain's prior and initial distribution.
pub fn compare_belief_updates<D: Domain<f64>>(
    domain: &D,
    updates: &[(ActionIndex, ObservationIndex)],
    k: usize,
    seed: u64,
    tag: u64,
) -> Result<BeliefComparison> {
    let prior = domain.prior(&mut stream(seed, Purpose::Prior, &[tag]));
    let mut rng = stream(seed, Purpose::Oracle, &[3, tag]);
    let mut particles = ParticleFilter::plain_from_prior(&prior, k, |g: &mut _| domain.sample_initial_state(g), &mut rng);
    let mut exact = EnumeratedBelief::from_prior(&domain.initial_state_distribution(), &prior)?;
    let cfg = RejectionConfig::new(StepKind::Dirichlet, k);
    let mut gap = 0.0f64;
    for &(a, z) in updates {
        let (next, stats) = particles.rejection_update(a, z, &cfg, &mut rng)?;
        let (post, likelihood) = exact_belief_update(&exact, a, z)?;
        gap = gap.max((stats.acceptance_rate() - likelihood).abs());
        particles = next;
        exact = post;
    }
    let empirical = EnumeratedBelief::from_particles(&particles)?;
    Ok(BeliefComparison {
        tv: tv_distance(&empirical.as_map(), &exact.as_map()),
        acceptance_gap: gap,
    })
}

/// Largest gap between lookahead values and brute-force expectimax over
/// random chain instances and particle beliefs.
pub fn lookahead_value_error(cfg: &SuiteConfig, instances: usize) -> Result<f64> {
    let mut rng = stream(cfg.seed, Purpose::Oracle, &[4]);
    let mut worst = 0.0f64;
    for _ in 0..instances {
        let chain = Chain::<f64>::random(&mut rng);
        let prior = chain.prior(&mut rng);
        let b = ParticleFilter::plain_from_prior(&prior, 5, |g: &mut _| chain.sample_initial_state(g), &mut rng);
        let exact = EnumeratedBelief::from_particles(&b)?;
        for depth in 1..=3 {
            let ours = lookahead_values(&chain, &b, depth, 0.95)?;
            let reference = brute_force_expectimax(&chain, &exact, depth, 0.95)?;
            for (x, y) in ours.iter().zip(&reference) {
                worst = worst.max((x - y).abs());
            }
        }
    }
    Ok(worst)
}

/// Every oracle check, in order.
pub fn run_suite(cfg: &SuiteConfig) -> Result<Vec<Check>> {
    let d = cfg.depth;
    let mut out = vec![
        Check::at_most(
            format!("root-sampled rollouts vs closed form (depth {d})"),
            rollout_tv(RolloutKind::RootSampled, cfg)?,
            TV_TOLERANCE,
        ),
        Check::at_most(
            format!("expected-model rollouts vs sequential (depth {d})"),
            rollout_tv(RolloutKind::Expected, cfg)?,
            TV_TOLERANCE,
        ),
        Check::at_most(
            format!("Dirichlet-step rollouts vs sequential (depth {d})"),
            rollout_tv(RolloutKind::Dirichlet, cfg)?,
            TV_TOLERANCE,
        ),
        Check::at_most(
            "closed form = sequential, all depth<=4 histories",
            identity_exhaustive_error()?,
            IDENTITY_TOLERANCE,
        ),
        Check::at_most(
            format!("closed form = sequential, {} random tables", cfg.random_tables),
            identity_random_error(cfg)?,
            IDENTITY_TOLERANCE,
        ),
        Check::at_most("history probabilities sum to 1", history_mass_error()?, 1e-9),
    ];
    let chain = compare_belief_updates(
        &Chain::<f64>::default(),
        &[
            (ActionIndex(0), ObservationIndex(0)),
            (ActionIndex(1), ObservationIndex(1)),
        ],
        cfg.samples,
        cfg.seed,
        0,
    )?;
    let tiger = compare_belief_updates(
        &Tiger::<f64>::with_accurate_prior(),
        &[(tiger::LISTEN, tiger::HEAR_LEFT)],
        cfg.samples,
        cfg.seed,
        1,
    )?;
    out.extend([
        Check::at_most("chain rejection update vs exact Bayes", chain.tv, TV_TOLERANCE),
        Check::at_most("chain acceptance rate vs likelihood", chain.acceptance_gap, ACCEPTANCE_TOLERANCE),
        Check::at_most("Tiger listen update vs exact Bayes", tiger.tv, TV_TOLERANCE),
        Check::at_most("Tiger acceptance rate vs likelihood", tiger.acceptance_gap, ACCEPTANCE_TOLERANCE),
        Check::at_most(
            "lookahead values vs brute-force expectimax",
            lookahead_value_error(cfg, 20)?,
            VALUE_TOLERANCE,
        ),
    ]);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identities_hold() {
        assert!(identity_exhaustive_error().unwrap() <= IDENTITY_TOLERANCE);
        assert!(history_mass_error().unwrap() <= 1e-9);
    }

    #[test]
    fn small_suite_reports_every_check() {
        let cfg = SuiteConfig {
            samples: 2000,
            random_tables: 10,
            ..SuiteConfig::default()
        };
        let checks = run_suite(&cfg).unwrap();
        assert_eq!(checks.len(), 11);
        assert!(checks[3].passed && checks[4].passed && checks[5].passed && checks[10].passed);
        assert!(checks[0].to_string().starts_with("PASS") || checks[0].to_string().starts_with("FAIL"));
    }
}

//! Learning runs: plan, act on the true environment, update the belief,
//! carry the learned counts into the next episode.

use std::time::Instant;

use bapomcp_core::belief::{LinkingState, Particle, ParticleFilter, RejectionConfig};
use bapomcp_core::domains::{Chain, Sysadmin, SysadminPrior, Tiger};
use bapomcp_core::planner::{lookahead_plan, Planner, PlannerConfig};
use bapomcp_core::rng::{stream, Purpose};
use bapomcp_core::{default_exploration, AugmentedState, Domain, Error, StepKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{DomainKind, ExperimentConfig, PlannerKind, PriorKind};

/// One `(run, episode)` result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub run: usize,
    pub episode: usize,
    #[serde(rename = "return")]
    pub ret: f64,
    pub mean_action_time_s: f64,
    pub capped: bool,
    pub deprived: bool,
    pub seed: u64,
}

/// Per-run outcome: records so far and the error that ended the run early.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub records: Vec<RunRecord>,
    pub aborted: Option<Error>,
}

/// Records of every run, ordered by `(run, episode)`.
#[derive(Clone, Debug, Default)]
pub struct LearningResult {
    pub records: Vec<RunRecord>,
    /// `(run, error)` for runs that stopped early.
    pub aborted: Vec<(usize, Error)>,
}

impl LearningResult {
    pub fn deprived(&self) -> bool {
        self.aborted
            .iter()
            .any(|(_, e)| matches!(e, Error::Deprived { .. }))
    }
}

fn rejection_config(cfg: &ExperimentConfig) -> RejectionConfig {
    let step = if cfg.variants.expected_model {
        StepKind::Expected
    } else {
        StepKind::Dirichlet
    };
    RejectionConfig {
        lambda: cfg.lambda,
        ..RejectionConfig::new(step, cfg.particles)
    }
}

fn run_with<D, P>(domain: &D, cfg: &ExperimentConfig, run: usize, mut belief: ParticleFilter<P>) -> RunOutcome
where
    D: Domain<f64>,
    P: Particle<f64>,
{
    let seed = cfg.seed;
    let exploration = cfg
        .exploration
        .unwrap_or_else(|| default_exploration(domain, cfg.horizon));
    let planner_cfg = PlannerConfig {
        num_sims: cfg.sims,
        max_depth: cfg.horizon,
        discount: cfg.gamma,
        exploration,
        variants: cfg.variants,
    };
    let mut planner = match Planner::new(planner_cfg, domain) {
        Ok(p) => p,
        Err(e) => {
            return RunOutcome {
                records: Vec::new(),
                aborted: Some(e),
            }
        }
    };
    let update = rejection_config(cfg);
    let mut records = Vec::with_capacity(cfg.episodes);
    let r = run as u64;
    for episode in 0..cfg.episodes {
        let e = episode as u64;
        if episode > 0 {
            let mut reset_rng = stream(seed, Purpose::EpisodeReset, &[r, e]);
            belief.reset_states(|g| domain.sample_initial_state(g), &mut reset_rng);
        }
        let mut env_rng = stream(seed, Purpose::Environment, &[r, e]);
        let mut state = domain.sample_initial_state(&mut env_rng);
        let mut ret = 0.0;
        let mut weight = 1.0;
        let mut plan_time = 0.0;
        let mut plans = 0usize;
        let mut failure = None;
        for t in 0..cfg.horizon {
            let step = [r, e, t as u64];
            let mut plan_rng = stream(seed, Purpose::Planner, &step);
            let remaining = cfg.horizon - t;
            let start = Instant::now();
            let action = match cfg.planner {
                PlannerKind::Pomcp => {
                    planner.config_mut().max_depth = remaining;
                    planner.plan(domain, &belief, &mut plan_rng)
                }
                PlannerKind::Lookahead => {
                    lookahead_plan(domain, &belief, cfg.depth.min(remaining), cfg.gamma, &mut plan_rng)
                }
            };
            plan_time += start.elapsed().as_secs_f64();
            plans += 1;
            let action = match action {
                Ok(a) => a,
                Err(err) => {
                    failure = Some(err);
                    break;
                }
            };
            ret += weight * domain.reward(state, action);
            weight *= cfg.gamma;
            let (next, z) = domain.sample_true(state, action, &mut env_rng);
            state = next;
            let mut update_rng = stream(seed, Purpose::BeliefUpdate, &step);
            match belief.rejection_update(action, z, &update, &mut update_rng) {
                Ok((b, _)) => belief = b,
                Err(err) => {
                    failure = Some(err);
                    break;
                }
            }
            if domain.is_terminal(state) {
                break;
            }
        }
        let mean_time = if plans == 0 { 0.0 } else { plan_time / plans as f64 };
        records.push(RunRecord {
            run,
            episode,
            ret,
            mean_action_time_s: mean_time,
            capped: mean_time > cfg.time_cap,
            deprived: matches!(failure, Some(Error::Deprived { .. })),
            seed,
        });
        if failure.is_some() {
            return RunOutcome {
                records,
                aborted: failure,
            };
        }
    }
    RunOutcome {
        records,
        aborted: None,
    }
}

fn run_domain<D: Domain<f64>>(domain: &D, cfg: &ExperimentConfig, run: usize) -> RunOutcome {
    let r = run as u64;
    let prior = domain.prior(&mut stream(cfg.seed, Purpose::Prior, &[r]));
    let mut init_rng = stream(cfg.seed, Purpose::InitialBelief, &[r]);
    let init = |g: &mut _| domain.sample_initial_state(g);
    if cfg.variants.linking_states {
        let b: ParticleFilter<LinkingState<f64>> =
            ParticleFilter::linking_from_prior(&prior, cfg.particles, init, &mut init_rng);
        run_with(domain, cfg, run, b)
    } else {
        let b: ParticleFilter<AugmentedState> =
            ParticleFilter::plain_from_prior(&prior, cfg.particles, init, &mut init_rng);
        run_with(domain, cfg, run, b)
    }
}

/// Runs run number `run` of the experiment.
pub fn run_single(cfg: &ExperimentConfig, run: usize) -> RunOutcome {
    match cfg.domain {
        DomainKind::Tiger => run_domain(&Tiger::default(), cfg, run),
        DomainKind::Sysadmin => {
            let prior = match cfg.prior {
                PriorKind::Noisy => SysadminPrior::Noisy,
                PriorKind::Accurate => SysadminPrior::Accurate,
            };
            run_domain(&Sysadmin::new(cfg.n, cfg.f).with_prior(prior), cfg, run)
        }
        DomainKind::Chain => run_domain(&Chain::default(), cfg, run),
    }
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// All runs of the experiment, in parallel over `cfg.workers` threads.
pub fn run_learning(cfg: &ExperimentConfig) -> LearningResult {
    let outcomes: Vec<RunOutcome> =
        pool(cfg.workers).install(|| (0..cfg.runs).into_par_iter().map(|r| run_single(cfg, r)).collect());
    let mut result = LearningResult::default();
    for (run, o) in outcomes.into_iter().enumerate() {
        result.records.extend(o.records);
        if let Some(e) = o.aborted {
            result.aborted.push((run, e));
        }
    }
    result
}

/// Mean seconds per plan call over all runs, measured on a single worker.
pub fn measure_action_time(cfg: &ExperimentConfig) -> f64 {
    let single = ExperimentConfig {
        workers: 1,
        ..cfg.clone()
    };
    let result = run_learning(&single);
    let n = result.records.len().max(1) as f64;
    result.records.iter().map(|r| r.mean_action_time_s).sum::<f64>() / n
}

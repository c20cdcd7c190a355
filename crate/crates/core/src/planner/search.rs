//! BA-POMCP: root-sample a particle, simulate down the tree, roll out at the
//! leaves, back up discounted returns.

use rand::Rng;

use crate::belief::{copy_particle, CopyMeter, Particle, ParticleFilter};
use crate::counts::CountView;
use crate::domain::Domain;
use crate::error::{Error, Result};
use crate::model::SampledModel;
use crate::num::Scalar;
use crate::planner::config::PlannerConfig;
use crate::planner::tree::{NodeId, SearchTree};
use crate::space::{ActionIndex, ObservationIndex, StateIndex};
use crate::step::{step_counting, step_root_expected, step_root_sampled, StepBuffers, StepKind};

/// The mutable state a single simulation carries around.
pub trait SimState<F: Scalar> {
    fn state(&self) -> StateIndex;

    fn step<R: Rng + ?Sized>(
        &mut self,
        a: ActionIndex,
        rng: &mut R,
        bufs: &mut StepBuffers<F>,
    ) -> Result<ObservationIndex>;
}

/// A private particle copy updated by counting steps.
pub struct CountingSim<P> {
    pub particle: P,
    pub kind: StepKind,
}

impl<F: Scalar, P: Particle<F>> SimState<F> for CountingSim<P> {
    #[inline]
    fn state(&self) -> StateIndex {
        self.particle.state()
    }

    #[inline]
    fn step<R: Rng + ?Sized>(
        &mut self,
        a: ActionIndex,
        rng: &mut R,
        bufs: &mut StepBuffers<F>,
    ) -> Result<ObservationIndex> {
        step_counting(&mut self.particle, a, self.kind, rng, bufs)
    }
}

/// Only a state index; transitions come from a model drawn from the root
/// particle's counts, which are borrowed, never copied.
pub struct RootSampledSim<'a, F, V> {
    pub state: StateIndex,
    pub counts: &'a V,
    pub model: &'a mut SampledModel<F>,
}

impl<F: Scalar, V: CountView<F>> SimState<F> for RootSampledSim<'_, F, V> {
    #[inline]
    fn state(&self) -> StateIndex {
        self.state
    }

    #[inline]
    fn step<R: Rng + ?Sized>(
        &mut self,
        a: ActionIndex,
        rng: &mut R,
        bufs: &mut StepBuffers<F>,
    ) -> Result<ObservationIndex> {
        step_root_sampled(&mut self.state, self.counts, self.model, a, rng, &mut bufs.scratch)
    }
}

/// Root-sampled simulation whose fixed model is the expected model of the
/// root counts.
pub struct RootExpectedSim<'a, V> {
    pub state: StateIndex,
    pub counts: &'a V,
}

impl<F: Scalar, V: CountView<F>> SimState<F> for RootExpectedSim<'_, V> {
    #[inline]
    fn state(&self) -> StateIndex {
        self.state
    }

    #[inline]
    fn step<R: Rng + ?Sized>(
        &mut self,
        a: ActionIndex,
        rng: &mut R,
        bufs: &mut StepBuffers<F>,
    ) -> Result<ObservationIndex> {
        step_root_expected(&mut self.state, self.counts, a, rng, &mut bufs.scratch)
    }
}

/// Counters from the most recent [`Planner::plan`] call.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PlanStats {
    pub simulations: usize,
    /// Particle copies made at the root of simulations.
    pub copies: CopyMeter,
    pub nodes: usize,
    /// Model rows drawn by root-sampled simulations, summed over simulations.
    pub rows_materialized: usize,
}

impl PlanStats {
    pub fn bytes_per_simulation(&self) -> f64 {
        if self.simulations == 0 {
            0.0
        } else {
            self.copies.bytes as f64 / self.simulations as f64
        }
    }
}

/// Tree, configuration and scratch buffers shared by all simulations of a
/// search.
pub struct SearchCore<F> {
    pub cfg: PlannerConfig<F>,
    pub tree: SearchTree<F>,
    bufs: StepBuffers<F>,
}

impl<F: Scalar> SearchCore<F> {
    pub fn new(cfg: PlannerConfig<F>, actions: usize, observations: usize) -> Self {
        Self {
            cfg,
            tree: SearchTree::new(actions, observations),
            bufs: StepBuffers::new(),
        }
    }

    /// One pass down the tree from `node` at `depth`; returns the discounted
    /// return credited to the chosen action.
    pub fn simulate<D, S, R>(
        &mut self,
        domain: &D,
        sim: &mut S,
        depth: usize,
        node: NodeId,
        rng: &mut R,
    ) -> Result<F>
    where
        D: Domain<F>,
        S: SimState<F>,
        R: Rng + ?Sized,
    {
        if depth >= self.cfg.max_depth || domain.is_terminal(sim.state()) {
            return Ok(F::zero());
        }
        let a = self.tree.ucb_select(node, self.cfg.exploration, rng);
        let reward = domain.reward(sim.state(), a);
        let z = sim.step(a, rng, &mut self.bufs)?;
        let future = match self.tree.child(node, a, z) {
            Some(child) => self.simulate(domain, sim, depth + 1, child, rng)?,
            None => {
                self.tree.add_child(node, a, z);
                self.rollout(domain, sim, depth + 1, rng)?
            }
        };
        let ret = reward + self.cfg.discount * future;
        self.tree.update(node, a, ret);
        Ok(ret)
    }

    /// Uniformly random actions until `max_depth` or a terminal state.
    pub fn rollout<D, S, R>(&mut self, domain: &D, sim: &mut S, depth: usize, rng: &mut R) -> Result<F>
    where
        D: Domain<F>,
        S: SimState<F>,
        R: Rng + ?Sized,
    {
        let actions = domain.spaces().actions;
        let mut ret = F::zero();
        let mut weight = F::one();
        for _ in depth..self.cfg.max_depth {
            if domain.is_terminal(sim.state()) {
                break;
            }
            let a = ActionIndex(rng.random_range(0..actions));
            ret += weight * domain.reward(sim.state(), a);
            sim.step(a, rng, &mut self.bufs)?;
            weight *= self.cfg.discount;
        }
        Ok(ret)
    }
}

/// Reusable BA-POMCP planner. A fresh tree is built on every call to
/// [`Planner::plan`]; allocations are kept between calls.
pub struct Planner<F> {
    core: SearchCore<F>,
    model: Option<SampledModel<F>>,
    stats: PlanStats,
}

impl<F: Scalar> Planner<F> {
    pub fn new<D: Domain<F>>(cfg: PlannerConfig<F>, domain: &D) -> Result<Self> {
        cfg.validate()?;
        let spaces = domain.spaces();
        Ok(Self {
            core: SearchCore::new(cfg, spaces.actions, spaces.observations),
            model: None,
            stats: PlanStats::default(),
        })
    }

    pub fn config(&self) -> &PlannerConfig<F> {
        &self.core.cfg
    }

    pub fn config_mut(&mut self) -> &mut PlannerConfig<F> {
        &mut self.core.cfg
    }

    pub fn tree(&self) -> &SearchTree<F> {
        &self.core.tree
    }

    pub fn stats(&self) -> &PlanStats {
        &self.stats
    }

    /// Runs `num_sims` simulations from the belief and returns the greedy
    /// root action. The belief is only read.
    pub fn plan<D, P, R>(&mut self, domain: &D, belief: &ParticleFilter<P>, rng: &mut R) -> Result<ActionIndex>
    where
        D: Domain<F>,
        P: Particle<F>,
        R: Rng + ?Sized,
    {
        self.core.cfg.validate()?;
        if belief.is_empty() {
            return Err(Error::EmptyBelief);
        }
        let variants = self.core.cfg.variants;
        let layout = domain.layout();
        self.stats = PlanStats::default();
        self.core.tree.clear();
        let root = self.core.tree.add_node();
        if variants.root_sample_model && !variants.expected_model && self.model.is_none() {
            self.model = Some(SampledModel::lazy(layout));
        }

        for _ in 0..self.core.cfg.num_sims {
            let particle = belief.sample_particle(rng)?;
            match (variants.root_sample_model, variants.expected_model) {
                (true, false) => {
                    let model = self.model.as_mut().expect("model allocated above");
                    model.reset(layout);
                    self.stats.copies.record(std::mem::size_of::<StateIndex>());
                    let mut sim = RootSampledSim {
                        state: particle.state(),
                        counts: particle,
                        model,
                    };
                    self.core.simulate(domain, &mut sim, 0, root, rng)?;
                    self.stats.rows_materialized += sim.model.materialized_rows();
                }
                (true, true) => {
                    self.stats.copies.record(std::mem::size_of::<StateIndex>());
                    let mut sim = RootExpectedSim {
                        state: particle.state(),
                        counts: particle,
                    };
                    self.core.simulate(domain, &mut sim, 0, root, rng)?;
                }
                (false, expected) => {
                    let kind = if expected {
                        StepKind::Expected
                    } else {
                        StepKind::Dirichlet
                    };
                    let mut sim = CountingSim {
                        particle: copy_particle(particle, &mut self.stats.copies),
                        kind,
                    };
                    self.core.simulate(domain, &mut sim, 0, root, rng)?;
                }
            }
            self.stats.simulations += 1;
        }
        self.stats.nodes = self.core.tree.num_nodes();
        self.core.tree.greedy_action(root, rng)
    }

    /// Estimated root values `Q(h₀, a)` from the last search.
    pub fn root_values(&self) -> Vec<F> {
        if self.core.tree.num_nodes() == 0 {
            return Vec::new();
        }
        self.core.tree.node(NodeId(0)).values.to_vec()
    }
}

/// One-shot convenience around [`Planner`].
pub fn plan<F, D, P, R>(
    domain: &D,
    belief: &ParticleFilter<P>,
    cfg: PlannerConfig<F>,
    rng: &mut R,
) -> Result<ActionIndex>
where
    F: Scalar,
    D: Domain<F>,
    P: Particle<F>,
    R: Rng + ?Sized,
{
    Planner::new(cfg, domain)?.plan(domain, belief, rng)
}

//! Step functions: advance an augmented state by one simulated transition.
//!
//! | function              | transition source       | counts updated |
//! |-----------------------|-------------------------|----------------|
//! | [`step_plain`]        | fresh `D_sa ~ Dir(χ_sa)` | yes            |
//! | [`step_expected`]     | `D_χ` (normalized χ)    | yes            |
//! | [`step_root_sampled`] | `Ḋ` drawn at the root   | no             |
//! | [`step_linking`]      | as configured           | into `δ`       |

use rand::Rng;

use crate::belief::{LinkingState, Particle};
use crate::counts::CountView;
use crate::error::Result;
use crate::model::{sample_transition, DirichletSampler, ExpectedSampler, ModelSampler, SampledModel};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};

/// How a counting step draws its transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum StepKind {
    /// Draw `D_sa ~ Dir(χ_sa)`, then `(s', z) ~ D_sa`.
    Dirichlet,
    /// Draw `(s', z) ~ D_χ`.
    Expected,
}

/// Reusable buffers for the step functions.
#[derive(Clone, Debug, Default)]
pub struct StepBuffers<F> {
    pub scratch: Vec<F>,
    pub draw: Vec<F>,
}

impl<F> StepBuffers<F> {
    pub fn new() -> Self {
        Self {
            scratch: Vec::new(),
            draw: Vec::new(),
        }
    }
}

/// Draws the next `(s', z)` from `view` without touching it.
#[inline]
pub fn sample_counting_transition<F: Scalar, V: CountView<F>, R: Rng + ?Sized>(
    view: &V,
    s: StateIndex,
    a: ActionIndex,
    kind: StepKind,
    rng: &mut R,
    bufs: &mut StepBuffers<F>,
) -> Result<(StateIndex, ObservationIndex)> {
    let layout = view.layout();
    match kind {
        StepKind::Dirichlet => {
            let mut sampler = DirichletSampler {
                view,
                scratch: &mut bufs.scratch,
                draw: &mut bufs.draw,
            };
            sample_transition(layout, s, a, &mut sampler, rng)
        }
        StepKind::Expected => {
            let mut sampler = ExpectedSampler {
                view,
                scratch: &mut bufs.scratch,
            };
            sample_transition(layout, s, a, &mut sampler, rng)
        }
    }
}

/// Counting step of either kind, applied in place.
#[inline]
pub fn step_counting<F: Scalar, P: Particle<F>, R: Rng + ?Sized>(
    particle: &mut P,
    a: ActionIndex,
    kind: StepKind,
    rng: &mut R,
    bufs: &mut StepBuffers<F>,
) -> Result<ObservationIndex> {
    let (next, z) = sample_counting_transition(particle, particle.state(), a, kind, rng, bufs)?;
    particle.apply_transition(a, next, z);
    Ok(z)
}

/// Samples a model row from the counts, a transition from that row, then
/// increments the counts and moves the state.
#[inline]
pub fn step_plain<F: Scalar, P: Particle<F>, R: Rng + ?Sized>(
    particle: &mut P,
    a: ActionIndex,
    rng: &mut R,
    bufs: &mut StepBuffers<F>,
) -> Result<ObservationIndex> {
    step_counting(particle, a, StepKind::Dirichlet, rng, bufs)
}

/// Samples from the expected model, then increments the counts.
#[inline]
pub fn step_expected<F: Scalar, P: Particle<F>, R: Rng + ?Sized>(
    particle: &mut P,
    a: ActionIndex,
    rng: &mut R,
    bufs: &mut StepBuffers<F>,
) -> Result<ObservationIndex> {
    step_counting(particle, a, StepKind::Expected, rng, bufs)
}

/// Counting step on a linking state: reads `base + δ`, writes into `δ`.
#[inline]
pub fn step_linking<F: Scalar, R: Rng + ?Sized>(
    particle: &mut LinkingState<F>,
    a: ActionIndex,
    kind: StepKind,
    rng: &mut R,
    bufs: &mut StepBuffers<F>,
) -> Result<ObservationIndex> {
    step_counting(particle, a, kind, rng, bufs)
}

/// Samples from the model drawn at the simulation root. No counts change;
/// rows of the model are drawn from `counts` the first time they are needed.
#[inline]
pub fn step_root_sampled<F: Scalar, V: CountView<F>, R: Rng + ?Sized>(
    state: &mut StateIndex,
    counts: &V,
    model: &mut SampledModel<F>,
    a: ActionIndex,
    rng: &mut R,
    scratch: &mut Vec<F>,
) -> Result<ObservationIndex> {
    let mut sampler = ModelSampler {
        model,
        view: counts,
        scratch,
    };
    let (next, z) = sample_transition(counts.layout(), *state, a, &mut sampler, rng)?;
    *state = next;
    Ok(z)
}

/// Root-sampled step where the root model is the expected model `D_χ` of the
/// root counts (the expected and root-sampling flags together).
#[inline]
pub fn step_root_expected<F: Scalar, V: CountView<F>, R: Rng + ?Sized>(
    state: &mut StateIndex,
    counts: &V,
    a: ActionIndex,
    rng: &mut R,
    scratch: &mut Vec<F>,
) -> Result<ObservationIndex> {
    let mut sampler = ExpectedSampler { view: counts, scratch };
    let (next, z) = sample_transition(counts.layout(), *state, a, &mut sampler, rng)?;
    *state = next;
    Ok(z)
}

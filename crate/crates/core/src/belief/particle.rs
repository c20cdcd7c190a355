use crate::counts::{CountTable, CountView, Layout, RowId};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};

/// An augmented state `⟨s, χ⟩` as stored in a particle filter.
///
/// Implementors expose their effective counts through [`CountView`] and
/// accept increments; how the counts are stored is up to them.
pub trait Particle<F: Scalar>: CountView<F> + Clone + Send + Sync {
    fn state(&self) -> StateIndex;

    fn set_state(&mut self, s: StateIndex);

    /// Adds one to a flat count entry.
    fn add_one(&mut self, flat: usize);

    /// Bytes a copy of this particle has to move.
    fn copy_bytes(&self) -> usize;

    /// Called after the particle is accepted into a new belief.
    fn after_belief_update(&mut self, _lambda: usize) {}

    /// Applies `(s, a) -> (s', z)`: increments the counts and moves to `s'`.
    #[inline]
    fn apply_transition(&mut self, a: ActionIndex, next: StateIndex, z: ObservationIndex) {
        let touched = self.layout().touched(self.state(), a, next, z);
        for &i in touched.as_slice() {
            self.add_one(i);
        }
        self.set_state(next);
    }
}

/// Plain augmented state owning a full count table.
#[derive(Clone, Debug, PartialEq)]
pub struct AugmentedState<F> {
    pub state: StateIndex,
    pub counts: CountTable<F>,
}

impl<F: Scalar> AugmentedState<F> {
    pub fn new(state: StateIndex, counts: CountTable<F>) -> Self {
        Self { state, counts }
    }
}

impl<F: Scalar> CountView<F> for AugmentedState<F> {
    #[inline]
    fn layout(&self) -> Layout {
        self.counts.layout()
    }
    #[inline]
    fn count(&self, flat: usize) -> F {
        self.counts.count(flat)
    }
    #[inline]
    fn row_total(&self, row: RowId) -> F {
        self.counts.row_total(row)
    }
    #[inline]
    fn with_row<T>(&self, row: RowId, scratch: &mut Vec<F>, f: impl FnOnce(&[F]) -> T) -> T {
        self.counts.with_row(row, scratch, f)
    }
}

impl<F: Scalar> Particle<F> for AugmentedState<F> {
    #[inline]
    fn state(&self) -> StateIndex {
        self.state
    }
    #[inline]
    fn set_state(&mut self, s: StateIndex) {
        self.state = s;
    }
    #[inline]
    fn add_one(&mut self, flat: usize) {
        self.counts.add(flat, F::one());
    }
    fn copy_bytes(&self) -> usize {
        std::mem::size_of::<StateIndex>() + self.counts.byte_size()
    }
}

/// Tally of particle copies made, in bytes moved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct CopyMeter {
    pub copies: usize,
    pub bytes: usize,
}

impl CopyMeter {
    #[inline]
    pub fn record(&mut self, bytes: usize) {
        self.copies += 1;
        self.bytes += bytes;
    }
}

/// Copies a particle for private mutation. Plain particles copy their whole
/// table; linking particles share the base and copy only their delta.
#[inline]
pub fn copy_particle<F: Scalar, P: Particle<F>>(particle: &P, meter: &mut CopyMeter) -> P {
    meter.record(particle.copy_bytes());
    particle.clone()
}

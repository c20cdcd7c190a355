//! Dirichlet count tables over `(s, a) -> (s', z)` outcomes.
//!
//! A table stores nonnegative real counts in one flat buffer. The [`Layout`]
//! decides how that buffer splits into Dirichlet rows:
//!
//! * `Joint`: one row per `(s, a)` with `|S|·|Z|` entries, indexed `s'·|Z| + z`.
//! * `Factored`: one transition row per `(s, a)` with `|S|` entries, followed
//!   by one observation row per `(a, s')` with `|Z|` entries.
//!
//! In both layouts a transition `(s, a, s', z)` touches one entry per factor,
//! so an increment changes exactly one entry of every row it involves.

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, Spaces, StateIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Factorization {
    Joint,
    Factored,
}

/// Identifies one Dirichlet row of a [`Layout`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RowId(pub usize);

/// Flat entries touched by one transition: one per factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Touched {
    flat: [usize; 2],
    len: u8,
}

impl Touched {
    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.flat[..self.len as usize]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Layout {
    spaces: Spaces,
    kind: Factorization,
}

impl Layout {
    pub const fn joint(spaces: Spaces) -> Self {
        Self {
            spaces,
            kind: Factorization::Joint,
        }
    }

    pub const fn factored(spaces: Spaces) -> Self {
        Self {
            spaces,
            kind: Factorization::Factored,
        }
    }

    #[inline]
    pub fn spaces(&self) -> Spaces {
        self.spaces
    }

    #[inline]
    pub fn kind(&self) -> Factorization {
        self.kind
    }

    #[inline]
    fn transition_rows(&self) -> usize {
        self.spaces.states * self.spaces.actions
    }

    pub fn num_rows(&self) -> usize {
        match self.kind {
            Factorization::Joint => self.transition_rows(),
            Factorization::Factored => 2 * self.transition_rows(),
        }
    }

    /// Total number of count entries.
    pub fn len(&self) -> usize {
        let Spaces {
            states: s,
            actions: a,
            observations: z,
        } = self.spaces;
        match self.kind {
            Factorization::Joint => s * a * s * z,
            Factorization::Factored => s * a * s + a * s * z,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The row holding the `(s, a)` transition counts (joint: the whole
    /// `(s', z)` distribution; factored: the `s'` marginal).
    #[inline]
    pub fn transition_row(&self, s: StateIndex, a: ActionIndex) -> RowId {
        RowId(s.0 * self.spaces.actions + a.0)
    }

    /// The `(a, s')` observation row. `None` for the joint layout.
    #[inline]
    pub fn observation_row(&self, a: ActionIndex, next: StateIndex) -> Option<RowId> {
        match self.kind {
            Factorization::Joint => None,
            Factorization::Factored => Some(RowId(
                self.transition_rows() + a.0 * self.spaces.states + next.0,
            )),
        }
    }

    /// `(offset, len)` of a row in the flat buffer.
    #[inline]
    pub fn row_span(&self, row: RowId) -> (usize, usize) {
        let Spaces {
            states: s,
            observations: z,
            ..
        } = self.spaces;
        match self.kind {
            Factorization::Joint => (row.0 * s * z, s * z),
            Factorization::Factored => {
                let t_rows = self.transition_rows();
                if row.0 < t_rows {
                    (row.0 * s, s)
                } else {
                    (t_rows * s + (row.0 - t_rows) * z, z)
                }
            }
        }
    }

    /// The row a flat entry belongs to.
    pub fn row_of(&self, flat: usize) -> RowId {
        let Spaces {
            states: s,
            observations: z,
            ..
        } = self.spaces;
        match self.kind {
            Factorization::Joint => RowId(flat / (s * z)),
            Factorization::Factored => {
                let t_len = self.transition_rows() * s;
                if flat < t_len {
                    RowId(flat / s)
                } else {
                    RowId(self.transition_rows() + (flat - t_len) / z)
                }
            }
        }
    }

    /// Flat entries incremented by the transition `(s, a) -> (s', z)`.
    #[inline]
    pub fn touched(
        &self,
        s: StateIndex,
        a: ActionIndex,
        next: StateIndex,
        z: ObservationIndex,
    ) -> Touched {
        let zn = self.spaces.observations;
        let (t_off, _) = self.row_span(self.transition_row(s, a));
        match self.kind {
            Factorization::Joint => Touched {
                flat: [t_off + next.0 * zn + z.0, 0],
                len: 1,
            },
            Factorization::Factored => {
                let o_row = RowId(self.transition_rows() + a.0 * self.spaces.states + next.0);
                let (o_off, _) = self.row_span(o_row);
                Touched {
                    flat: [t_off + next.0, o_off + z.0],
                    len: 2,
                }
            }
        }
    }
}

/// Read access to (possibly composite) counts.
pub trait CountView<F: Scalar> {
    fn layout(&self) -> Layout;

    fn count(&self, flat: usize) -> F;

    fn row_total(&self, row: RowId) -> F;

    /// Runs `f` on the effective counts of `row`. Plain tables hand out their
    /// own storage; composite views fill `scratch` first.
    fn with_row<T>(&self, row: RowId, scratch: &mut Vec<F>, f: impl FnOnce(&[F]) -> T) -> T;
}

/// Dense count table.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable<F> {
    layout: Layout,
    counts: Vec<F>,
}

impl<F: Scalar> CountTable<F> {
    pub fn zeros(layout: Layout) -> Self {
        Self {
            layout,
            counts: vec![F::zero(); layout.len()],
        }
    }

    pub fn from_vec(layout: Layout, counts: Vec<F>) -> Result<Self> {
        if counts.len() != layout.len() {
            return Err(Error::InvalidConfig(format!(
                "count buffer has {} entries, layout needs {}",
                counts.len(),
                layout.len()
            )));
        }
        if let Some(bad) = counts.iter().find(|c| !(**c >= F::zero())) {
            return Err(Error::InvalidConfig(format!("negative or NaN count {bad}")));
        }
        Ok(Self { layout, counts })
    }

    #[inline]
    pub fn as_slice(&self) -> &[F] {
        &self.counts
    }

    #[inline]
    pub fn row(&self, row: RowId) -> &[F] {
        let (off, len) = self.layout.row_span(row);
        &self.counts[off..off + len]
    }

    #[inline]
    pub fn row_mut(&mut self, row: RowId) -> &mut [F] {
        let (off, len) = self.layout.row_span(row);
        &mut self.counts[off..off + len]
    }

    #[inline]
    pub fn add(&mut self, flat: usize, amount: F) {
        self.counts[flat] += amount;
    }

    /// Adds one to every entry the transition `(s, a) -> (s', z)` touches.
    #[inline]
    pub fn increment(
        &mut self,
        s: StateIndex,
        a: ActionIndex,
        next: StateIndex,
        z: ObservationIndex,
    ) {
        for &i in self.layout.touched(s, a, next, z).as_slice() {
            self.counts[i] += F::one();
        }
    }

    /// Row id of the first row whose total is not positive, if any.
    pub fn first_empty_row(&self) -> Option<RowId> {
        (0..self.layout.num_rows())
            .map(RowId)
            .find(|&r| !(self.row(r).iter().copied().sum::<F>() > F::zero()))
    }

    /// Bytes held by the count buffer (what a deep copy moves).
    pub fn byte_size(&self) -> usize {
        self.counts.len() * std::mem::size_of::<F>()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }
}

impl<F: Scalar> CountView<F> for CountTable<F> {
    #[inline]
    fn layout(&self) -> Layout {
        self.layout
    }

    #[inline]
    fn count(&self, flat: usize) -> F {
        self.counts[flat]
    }

    #[inline]
    fn row_total(&self, row: RowId) -> F {
        self.row(row).iter().copied().sum()
    }

    #[inline]
    fn with_row<T>(&self, row: RowId, _scratch: &mut Vec<F>, f: impl FnOnce(&[F]) -> T) -> T {
        f(self.row(row))
    }
}

/// Expected dynamics `D_χ(s', z | s, a)`: normalized counts, recomputed on
/// every call.
pub fn expected_prob<F: Scalar, V: CountView<F>>(
    view: &V,
    s: StateIndex,
    a: ActionIndex,
    next: StateIndex,
    z: ObservationIndex,
) -> Result<F> {
    let layout = view.layout();
    let touched = layout.touched(s, a, next, z);
    let mut p = F::one();
    for &flat in touched.as_slice() {
        let row = layout.row_of(flat);
        let total = view.row_total(row);
        if !(total > F::zero()) {
            return Err(Error::ZeroRowTotal { row: row.0 });
        }
        p *= view.count(flat) / total;
    }
    Ok(p)
}

/// Adds one to `(s, a, s', z)` in `table`.
pub fn increment_count<F: Scalar>(
    table: &mut CountTable<F>,
    s: StateIndex,
    a: ActionIndex,
    next: StateIndex,
    z: ObservationIndex,
) {
    table.increment(s, a, next, z);
}

/// Picks an index of `weights` with probability proportional to its weight,
/// given `u` uniform in `[0, 1)` and the weights' `total`.
#[inline]
pub(crate) fn pick_weighted<F: Scalar>(weights: &[F], total: F, u: F) -> usize {
    let mut target = u * total;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > F::zero() {
            if target < w {
                return i;
            }
            target -= w;
            last_positive = i;
        }
    }
    // rounding pushed us past the end
    last_positive
}

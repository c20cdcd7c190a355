//! Drawing transitions from counts: the expected model, Dirichlet draws and
//! root-sampled models.

use rand::Rng;

use crate::counts::{pick_weighted, CountView, Factorization, Layout, RowId};
use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::space::{ActionIndex, ObservationIndex, StateIndex};

/// Something that can pick an entry of a Dirichlet row.
pub trait RowSampler<F: Scalar> {
    fn sample_in_row<R: Rng + ?Sized>(&mut self, row: RowId, rng: &mut R) -> Result<usize>;
}

/// Samples `(s', z)` for `(s, a)` one factor at a time.
#[inline]
pub fn sample_transition<F: Scalar, S: RowSampler<F>, R: Rng + ?Sized>(
    layout: Layout,
    s: StateIndex,
    a: ActionIndex,
    sampler: &mut S,
    rng: &mut R,
) -> Result<(StateIndex, ObservationIndex)> {
    let i = sampler.sample_in_row(layout.transition_row(s, a), rng)?;
    match layout.kind() {
        Factorization::Joint => {
            let zn = layout.spaces().observations;
            Ok((StateIndex(i / zn), ObservationIndex(i % zn)))
        }
        Factorization::Factored => {
            let next = StateIndex(i);
            let o_row = layout
                .observation_row(a, next)
                .expect("factored layout has observation rows");
            let z = sampler.sample_in_row(o_row, rng)?;
            Ok((next, ObservationIndex(z)))
        }
    }
}

/// Samples rows of the expected model, recomputing normalizers each call.
pub struct ExpectedSampler<'a, F, V> {
    pub view: &'a V,
    pub scratch: &'a mut Vec<F>,
}

impl<F: Scalar, V: CountView<F>> RowSampler<F> for ExpectedSampler<'_, F, V> {
    #[inline]
    fn sample_in_row<R: Rng + ?Sized>(&mut self, row: RowId, rng: &mut R) -> Result<usize> {
        let u = F::sample_unit(rng);
        self.view.with_row(row, self.scratch, |counts| {
            let total: F = counts.iter().copied().sum();
            if !(total > F::zero()) {
                return Err(Error::ZeroRowTotal { row: row.0 });
            }
            Ok(pick_weighted(counts, total, u))
        })
    }
}

/// Draws a fresh `D_sa ~ Dir(χ_sa)` for every row it is asked about.
pub struct DirichletSampler<'a, F, V> {
    pub view: &'a V,
    pub scratch: &'a mut Vec<F>,
    pub draw: &'a mut Vec<F>,
}

impl<F: Scalar, V: CountView<F>> RowSampler<F> for DirichletSampler<'_, F, V> {
    #[inline]
    fn sample_in_row<R: Rng + ?Sized>(&mut self, row: RowId, rng: &mut R) -> Result<usize> {
        let draw = &mut *self.draw;
        self.view.with_row(row, self.scratch, |counts| {
            let total = fill_gamma(counts, rng, draw)?;
            let u = F::sample_unit(rng);
            Ok(pick_weighted(draw, total, u))
        })
    }
}

/// Fills `out` with unnormalized Gamma variates for `alpha` and returns their
/// sum. Normalizing `out` by the sum is a Dirichlet draw.
fn fill_gamma<F: Scalar, R: Rng + ?Sized>(alpha: &[F], rng: &mut R, out: &mut Vec<F>) -> Result<F> {
    out.clear();
    let mut alpha_total = F::zero();
    let mut sum = F::zero();
    for &c in alpha {
        let g = F::sample_gamma(c, rng);
        alpha_total += c;
        sum += g;
        out.push(g);
    }
    if !(alpha_total > F::zero()) {
        return Err(Error::EmptyDirichlet);
    }
    if !(sum > F::zero()) || !sum.is_finite() {
        // Every variate underflowed (all shapes tiny). In that limit the
        // Dirichlet is a vertex of the simplex picked with probability ∝ α.
        let u = F::sample_unit(rng);
        let k = pick_weighted(alpha, alpha_total, u);
        out.iter_mut().for_each(|x| *x = F::zero());
        out[k] = F::one();
        sum = F::one();
    }
    Ok(sum)
}

/// One draw from `Dirichlet(alpha)`; zero entries stay zero.
pub fn sample_dirichlet_row<F: Scalar, R: Rng + ?Sized>(alpha: &[F], rng: &mut R) -> Result<Vec<F>> {
    let mut out = Vec::with_capacity(alpha.len());
    let sum = fill_gamma(alpha, rng, &mut out)?;
    for x in &mut out {
        *x /= sum;
    }
    Ok(out)
}

/// Draws `(s', z) ~ D_χ(·, · | s, a)`.
pub fn sample_expected_transition<F: Scalar, V: CountView<F>, R: Rng + ?Sized>(
    view: &V,
    s: StateIndex,
    a: ActionIndex,
    rng: &mut R,
) -> Result<(StateIndex, ObservationIndex)> {
    let mut scratch = Vec::new();
    let mut sampler = ExpectedSampler {
        view,
        scratch: &mut scratch,
    };
    sample_transition(view.layout(), s, a, &mut sampler, rng)
}

const ABSENT: u32 = u32::MAX;

/// A dynamics model `Ḋ ~ Dir(χ)` drawn at the root of a simulation.
///
/// Rows are materialized on first access and stay fixed afterwards. The
/// buffers can be reused across simulations through [`SampledModel::reset`],
/// which only clears the rows that were actually touched.
#[derive(Clone, Debug)]
pub struct SampledModel<F> {
    layout: Layout,
    slot: Vec<u32>,
    pool: Vec<F>,
    touched: Vec<RowId>,
    gamma: Vec<F>,
}

impl<F: Scalar> SampledModel<F> {
    /// A model with no materialized rows.
    pub fn lazy(layout: Layout) -> Self {
        Self {
            layout,
            slot: vec![ABSENT; layout.num_rows()],
            pool: Vec::new(),
            touched: Vec::new(),
            gamma: Vec::new(),
        }
    }

    /// `sample_full_model`: eager mode draws every row in row order, lazy mode
    /// draws nothing until rows are requested.
    pub fn sample_full<V: CountView<F>, R: Rng + ?Sized>(
        view: &V,
        rng: &mut R,
        lazy: bool,
    ) -> Result<Self> {
        let layout = view.layout();
        let mut model = Self::lazy(layout);
        if !lazy {
            let mut scratch = Vec::new();
            for r in 0..layout.num_rows() {
                model.materialize(view, RowId(r), rng, &mut scratch)?;
            }
        }
        Ok(model)
    }

    /// Forgets all materialized rows, keeping allocations.
    pub fn reset(&mut self, layout: Layout) {
        if layout != self.layout {
            *self = Self::lazy(layout);
            return;
        }
        for r in self.touched.drain(..) {
            self.slot[r.0] = ABSENT;
        }
        self.pool.clear();
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Number of rows drawn so far.
    pub fn materialized_rows(&self) -> usize {
        self.touched.len()
    }

    pub fn is_materialized(&self, row: RowId) -> bool {
        self.slot[row.0] != ABSENT
    }

    /// Already drawn row, if any.
    pub fn get(&self, row: RowId) -> Option<&[F]> {
        let off = self.slot[row.0];
        if off == ABSENT {
            return None;
        }
        let (_, len) = self.layout.row_span(row);
        Some(&self.pool[off as usize..off as usize + len])
    }

    fn materialize<V: CountView<F>, R: Rng + ?Sized>(
        &mut self,
        view: &V,
        row: RowId,
        rng: &mut R,
        scratch: &mut Vec<F>,
    ) -> Result<usize> {
        let off = self.slot[row.0];
        if off != ABSENT {
            return Ok(off as usize);
        }
        let gamma = &mut self.gamma;
        let sum = view.with_row(row, scratch, |counts| fill_gamma(counts, rng, gamma))?;
        let off = self.pool.len();
        self.pool.extend(self.gamma.iter().map(|&g| g / sum));
        self.slot[row.0] = off as u32;
        self.touched.push(row);
        Ok(off)
    }

    /// The probability vector of `row`, drawing it from `view` on first use.
    pub fn row<V: CountView<F>, R: Rng + ?Sized>(
        &mut self,
        view: &V,
        row: RowId,
        rng: &mut R,
        scratch: &mut Vec<F>,
    ) -> Result<&[F]> {
        let off = self.materialize(view, row, rng, scratch)?;
        let (_, len) = self.layout.row_span(row);
        Ok(&self.pool[off..off + len])
    }
}

/// Samples from a root-sampled model, materializing rows from `view`.
pub struct ModelSampler<'a, F, V> {
    pub model: &'a mut SampledModel<F>,
    pub view: &'a V,
    pub scratch: &'a mut Vec<F>,
}

impl<F: Scalar, V: CountView<F>> RowSampler<F> for ModelSampler<'_, F, V> {
    #[inline]
    fn sample_in_row<R: Rng + ?Sized>(&mut self, row: RowId, rng: &mut R) -> Result<usize> {
        let probs = self.model.row(self.view, row, rng, self.scratch)?;
        let u = F::sample_unit(rng);
        Ok(pick_weighted(probs, F::one(), u))
    }
}

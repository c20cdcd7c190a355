//! Linking states: a shared immutable count table plus a small private delta.

use std::sync::Arc;

use crate::belief::particle::Particle;
use crate::counts::{CountTable, CountView, Layout, RowId};
use crate::num::Scalar;
use crate::space::StateIndex;

/// Sparse added counts, kept sorted by flat index.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Delta<F> {
    entries: Vec<(usize, F)>,
}

impl<F: Scalar> Delta<F> {
    pub fn new() -> Self {
        Self {
            entries: Vec::new(),
        }
    }

    /// Number of distinct updated entries.
    #[inline]
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    #[inline]
    pub fn get(&self, flat: usize) -> F {
        match self.entries.binary_search_by_key(&flat, |e| e.0) {
            Ok(i) => self.entries[i].1,
            Err(_) => F::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, flat: usize, amount: F) {
        match self.entries.binary_search_by_key(&flat, |e| e.0) {
            Ok(i) => self.entries[i].1 += amount,
            Err(i) => self.entries.insert(i, (flat, amount)),
        }
    }

    /// Entries with flat index in `[start, end)`.
    #[inline]
    pub fn range(&self, start: usize, end: usize) -> &[(usize, F)] {
        let lo = self.entries.partition_point(|e| e.0 < start);
        let hi = self.entries.partition_point(|e| e.0 < end);
        &self.entries[lo..hi]
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, F)> + '_ {
        self.entries.iter().copied()
    }

    pub fn clear(&mut self) {
        self.entries.clear();
    }

    fn byte_size(&self) -> usize {
        self.entries.len() * std::mem::size_of::<(usize, F)>()
    }
}

/// `⟨s, l, δ⟩`: effective counts are `base + delta`, and the base is never
/// written through this handle.
#[derive(Clone, Debug)]
pub struct LinkingState<F> {
    pub state: StateIndex,
    base: Arc<CountTable<F>>,
    delta: Delta<F>,
}

impl<F: Scalar> LinkingState<F> {
    pub fn new(state: StateIndex, base: Arc<CountTable<F>>) -> Self {
        Self {
            state,
            base,
            delta: Delta::new(),
        }
    }

    pub fn base(&self) -> &Arc<CountTable<F>> {
        &self.base
    }

    pub fn delta(&self) -> &Delta<F> {
        &self.delta
    }

    /// `base + delta` at one entry.
    #[inline]
    pub fn effective_count(&self, flat: usize) -> F {
        self.base.count(flat) + self.delta.get(flat)
    }

    /// Folds the delta into a fresh base when it holds more than `lambda`
    /// entries. Returns whether a merge happened.
    pub fn merge_if_needed(&mut self, lambda: usize) -> bool {
        if self.delta.len() <= lambda {
            return false;
        }
        let mut merged = (*self.base).clone();
        for (flat, amount) in self.delta.iter() {
            merged.add(flat, amount);
        }
        self.base = Arc::new(merged);
        self.delta.clear();
        true
    }

    /// Materializes the effective counts.
    pub fn to_table(&self) -> CountTable<F> {
        let mut t = (*self.base).clone();
        for (flat, amount) in self.delta.iter() {
            t.add(flat, amount);
        }
        t
    }
}

impl<F: Scalar> CountView<F> for LinkingState<F> {
    #[inline]
    fn layout(&self) -> Layout {
        self.base.layout()
    }

    #[inline]
    fn count(&self, flat: usize) -> F {
        self.effective_count(flat)
    }

    #[inline]
    fn row_total(&self, row: RowId) -> F {
        let (off, len) = self.base.layout().row_span(row);
        let extra: F = self.delta.range(off, off + len).iter().map(|e| e.1).sum();
        self.base.row_total(row) + extra
    }

    #[inline]
    fn with_row<T>(&self, row: RowId, scratch: &mut Vec<F>, f: impl FnOnce(&[F]) -> T) -> T {
        let (off, len) = self.base.layout().row_span(row);
        let extra = self.delta.range(off, off + len);
        if extra.is_empty() {
            return f(self.base.row(row));
        }
        scratch.clear();
        scratch.extend_from_slice(self.base.row(row));
        for &(flat, amount) in extra {
            scratch[flat - off] += amount;
        }
        f(scratch)
    }
}

impl<F: Scalar> Particle<F> for LinkingState<F> {
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
        self.delta.add(flat, F::one());
    }
    fn copy_bytes(&self) -> usize {
        std::mem::size_of::<StateIndex>()
            + std::mem::size_of::<Arc<CountTable<F>>>()
            + self.delta.byte_size()
    }
    fn after_belief_update(&mut self, lambda: usize) {
        self.merge_if_needed(lambda);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::belief::particle::{copy_particle, AugmentedState, CopyMeter};
    use crate::space::{ActionIndex, ObservationIndex, Spaces};

    fn base() -> Arc<CountTable<f64>> {
        let l = Layout::joint(Spaces::new(2, 2, 2));
        Arc::new(CountTable::from_vec(l, (0..l.len()).map(|i| 1.0 + i as f64).collect()).unwrap())
    }

    #[test]
    fn empty_delta_is_identity() {
        let b = base();
        let ls = LinkingState::new(StateIndex(0), b.clone());
        for i in 0..b.len() {
            assert_eq!(ls.effective_count(i), b.count(i));
        }
    }

    #[test]
    fn delta_adds_to_base() {
        let l = Layout::joint(Spaces::new(1, 1, 2));
        let b = Arc::new(CountTable::from_vec(l, vec![5.0f64, 1.0]).unwrap());
        let mut ls = LinkingState::new(StateIndex(0), b.clone());
        ls.add_one(0);
        ls.add_one(0);
        assert_eq!(ls.effective_count(0), 7.0);
        assert_eq!(b.count(0), 5.0);
        assert_eq!(ls.row_total(RowId(0)), 8.0);
    }

    #[test]
    fn merge_threshold_is_strict() {
        let mut ls = LinkingState::new(StateIndex(0), base());
        ls.add_one(0);
        ls.add_one(5);
        assert!(!ls.merge_if_needed(2));
        assert_eq!(ls.delta().len(), 2);
        let before: Vec<f64> = (0..16).map(|i| ls.effective_count(i)).collect();
        ls.add_one(9);
        assert!(ls.merge_if_needed(2));
        assert!(ls.delta().is_empty());
        let mut expect = before;
        expect[9] += 1.0;
        let after: Vec<f64> = (0..16).map(|i| ls.effective_count(i)).collect();
        assert_eq!(after, expect);
    }

    #[test]
    fn merge_leaves_siblings_untouched() {
        let b = base();
        let mut x = LinkingState::new(StateIndex(0), b.clone());
        let mut y = LinkingState::new(StateIndex(1), b.clone());
        y.add_one(3);
        x.add_one(0);
        x.add_one(1);
        assert!(x.merge_if_needed(0));
        assert_eq!(y.effective_count(0), b.count(0));
        assert_eq!(y.effective_count(3), b.count(3) + 1.0);
        assert!(!Arc::ptr_eq(x.base(), &b));
        assert_eq!(*b, *base());
    }

    #[test]
    fn with_row_sees_delta() {
        let mut ls = LinkingState::new(StateIndex(0), base());
        ls.add_one(5);
        let mut scratch = Vec::new();
        let row = ls.with_row(RowId(1), &mut scratch, |r| r.to_vec());
        assert_eq!(row, vec![5.0, 7.0, 7.0, 8.0]);
    }

    #[test]
    fn copy_is_shallow_and_isolated() {
        let l = Layout::joint(Spaces::new(10, 10, 1000));
        let b = Arc::new(CountTable::<f64>::zeros(l));
        let mut ls = LinkingState::new(StateIndex(0), b.clone());
        ls.add_one(3);
        ls.add_one(70);
        let mut meter = CopyMeter::default();
        let mut copy = copy_particle(&ls, &mut meter);
        assert!(meter.bytes < 200, "copied {} bytes", meter.bytes);
        assert!(Arc::ptr_eq(copy.base(), &b));
        copy.add_one(3);
        assert_eq!(ls.effective_count(3), 1.0);
        assert_eq!(copy.effective_count(3), 2.0);
    }

    #[test]
    fn linking_matches_plain_under_same_increments() {
        let b = base();
        let mut plain = AugmentedState::new(StateIndex(0), (*b).clone());
        let mut link = LinkingState::new(StateIndex(0), b);
        let steps = [(0, 1, 1), (1, 0, 0), (1, 1, 1), (0, 0, 1)];
        for (i, &(a, n, z)) in steps.iter().enumerate() {
            plain.apply_transition(ActionIndex(a), StateIndex(n), ObservationIndex(z));
            link.apply_transition(ActionIndex(a), StateIndex(n), ObservationIndex(z));
            if i == 2 {
                link.merge_if_needed(1);
            }
        }
        assert_eq!(link.state, plain.state);
        assert_eq!(link.to_table(), plain.counts);
    }
}

use smallvec::{smallvec, SmallVec};

use crate::feature::ProductSet;
use crate::model::Weight;

/// A table value: a finite weight or one of the two infinities.
/// Variant order gives `NegInf < Finite(_) < PosInf`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bound {
    NegInf,
    Finite(Weight),
    PosInf,
}

impl Bound {
    pub fn finite(self) -> Option<Weight> {
        match self {
            Bound::Finite(w) => Some(w),
            _ => None,
        }
    }

    /// Adds a weight; infinities absorb it.
    pub fn plus(self, w: Weight) -> Bound {
        match self {
            Bound::Finite(x) => Bound::Finite(x + w),
            other => other,
        }
    }
}

/// The set operations partition cells need. Implemented by [`ProductSet`]
/// and by `u64` bitmasks for universes of at most 64 products.
pub trait CellSet: Clone + PartialEq + std::fmt::Debug {
    fn and(&self, other: &Self) -> Self;
    fn union_with(&mut self, other: &Self);
    fn difference_with(&mut self, other: &Self);
    fn intersects(&self, other: &Self) -> bool;
    fn is_empty(&self) -> bool;
    fn contains(&self, index: usize) -> bool;
    /// The empty set over the same universe.
    fn none_like(&self) -> Self;
}

impl CellSet for ProductSet {
    fn and(&self, other: &Self) -> Self {
        self & other
    }
    fn union_with(&mut self, other: &Self) {
        self.union_with(other)
    }
    fn difference_with(&mut self, other: &Self) {
        self.difference_with(other)
    }
    fn intersects(&self, other: &Self) -> bool {
        self.intersects(other)
    }
    fn is_empty(&self) -> bool {
        self.is_empty()
    }
    fn contains(&self, index: usize) -> bool {
        self.contains(index)
    }
    fn none_like(&self) -> Self {
        ProductSet::empty(self.universe())
    }
}

impl CellSet for u64 {
    fn and(&self, other: &Self) -> Self {
        self & other
    }
    fn union_with(&mut self, other: &Self) {
        *self |= other
    }
    fn difference_with(&mut self, other: &Self) {
        *self &= !other
    }
    fn intersects(&self, other: &Self) -> bool {
        self & other != 0
    }
    fn is_empty(&self) -> bool {
        *self == 0
    }
    fn contains(&self, index: usize) -> bool {
        index < 64 && self >> index & 1 == 1
    }
    fn none_like(&self) -> Self {
        0
    }
}

/// Most entries have very few cells; keep those off the heap.
type Cells<S> = SmallVec<[(S, Bound); 4]>;

/// A value defined piecewise on a partition of `context` into disjoint,
/// non-empty cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionedValue<S = ProductSet> {
    cells: Cells<S>,
    context: S,
}

impl<S: CellSet> PartitionedValue<S> {
    pub fn uniform(context: S, value: Bound) -> Self {
        let cells = if context.is_empty() {
            SmallVec::new()
        } else {
            smallvec![(context.clone(), value)]
        };
        PartitionedValue { cells, context }
    }

    pub fn cells(&self) -> &[(S, Bound)] {
        &self.cells
    }

    pub fn context(&self) -> &S {
        &self.context
    }

    pub fn value_at(&self, product: usize) -> Option<Bound> {
        self.cells
            .iter()
            .find(|(cell, _)| cell.contains(product))
            .map(|(_, v)| *v)
    }

    /// Cells must be non-empty, pairwise disjoint and cover the context.
    pub fn check(&self) -> Result<(), String> {
        let mut seen = self.context.none_like();
        for (cell, value) in &self.cells {
            if cell.is_empty() {
                return Err(format!("empty cell with value {value:?}"));
            }
            if cell.intersects(&seen) {
                return Err(format!("overlapping cell {cell:?}"));
            }
            seen.union_with(cell);
        }
        if seen != self.context {
            return Err(format!("cells cover {seen:?}, context is {:?}", self.context));
        }
        Ok(())
    }

    /// Splits every cell where a candidate region beats the current value.
    /// Candidate regions must be pairwise disjoint. Each original cell is
    /// compared against its value before the call; split-off parts are
    /// appended and not revisited.
    pub fn improve(&mut self, candidates: &[(S, Bound)], better: impl Fn(Bound, Bound) -> bool) {
        let original = self.cells.len();
        let mut changed = false;
        for i in 0..original {
            let value = self.cells[i].1;
            for (region, candidate) in candidates {
                if !better(*candidate, value) || !self.cells[i].0.intersects(region) {
                    continue;
                }
                changed = true;
                let x = self.cells[i].0.and(region);
                if x == self.cells[i].0 {
                    // regions are disjoint, so no other one meets this cell
                    self.cells[i].1 = *candidate;
                    break;
                }
                self.cells[i].0.difference_with(&x);
                self.cells.push((x, *candidate));
            }
        }
        if changed {
            self.coalesce();
        }
        debug_assert_eq!(self.check(), Ok(()));
    }

    /// Merges cells with equal values into the first of them.
    pub fn coalesce(&mut self) {
        let mut i = 0;
        while i < self.cells.len() {
            let mut j = i + 1;
            while j < self.cells.len() {
                if self.cells[j].1 == self.cells[i].1 {
                    let (cell, _) = self.cells.remove(j);
                    self.cells[i].0.union_with(&cell);
                } else {
                    j += 1;
                }
            }
            i += 1;
        }
    }

    /// Rebuilds the partition over another set representation.
    pub fn convert<T: CellSet>(&self, f: impl Fn(&S) -> T) -> PartitionedValue<T> {
        PartitionedValue {
            cells: self.cells.iter().map(|(c, v)| (f(c), *v)).collect(),
            context: f(&self.context),
        }
    }

    /// Applies `f` to every value, then merges equal cells.
    pub fn map(mut self, f: impl Fn(Bound) -> Bound) -> Self {
        for (_, v) in &mut self.cells {
            *v = f(*v);
        }
        self.coalesce();
        self
    }
}

use crate::feature::ProductSet;
use crate::model::{FamilyGraph, StateId, Weight};
use crate::scc::SymbolicScc;

use super::partition::{Bound, CellSet, PartitionedValue};
use super::Mode;

/// `d[k][v]`: best weight of a length-`k` walk from the anchor to `v`
/// inside the component, per product. Weights are oriented (negated in
/// min mode). Cells are stored over the component's own products,
/// renumbered `0..` by rank; [`KarpTable::value_at`] takes model indices.
#[derive(Debug, Clone)]
pub struct KarpTable {
    pub n: usize,
    pub anchor: StateId,
    products: ProductSet,
    d: Vec<Vec<PartitionedValue>>,
}

impl KarpTable {
    /// The cell structure over local product numbers.
    pub fn local(&self, k: usize, v: StateId) -> &PartitionedValue {
        &self.d[k][v.0]
    }

    /// The component's products; local number `i` is its `i`-th member.
    pub fn products(&self) -> &ProductSet {
        &self.products
    }

    pub fn value_at(&self, k: usize, v: StateId, product: usize) -> Option<Bound> {
        if !self.products.contains(product) {
            return None;
        }
        let rank = self.products.iter().take_while(|&p| p < product).count();
        self.d[k][v.0].value_at(rank)
    }
}

/// The component restated over its own products: state sets and the guards
/// of internal transitions narrowed to both endpoints.
struct Local<S> {
    r: Vec<S>,
    inner: Vec<(usize, usize, S, Weight)>,
}

fn localize(scc: &SymbolicScc, g: &FamilyGraph, weights: &[Weight]) -> Local<ProductSet> {
    let within = &scc.anchor_products;
    let r: Vec<ProductSet> = scc.r.iter().map(|x| x.compress(within)).collect();
    let inner = g
        .wfts
        .transitions()
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let (u, v) = (t.source.0, t.target.0);
            let guard = &(&g.guards[i].compress(within) & &r[u]) & &r[v];
            (!guard.is_empty()).then_some((u, v, guard, weights[i]))
        })
        .collect();
    Local { r, inner }
}

fn to_mask(s: &ProductSet) -> u64 {
    s.iter().fold(0, |m, i| m | 1 << i)
}

fn from_mask(m: &u64, universe: usize) -> ProductSet {
    let mut s = ProductSet::empty(universe);
    (0..universe).filter(|i| m >> i & 1 == 1).for_each(|i| s.insert(i));
    s
}

fn fill<S: CellSet>(local: &Local<S>, s0: usize, n: usize) -> Vec<Vec<PartitionedValue<S>>> {
    let row = |init: &dyn Fn(usize) -> Bound| -> Vec<PartitionedValue<S>> {
        local
            .r
            .iter()
            .enumerate()
            .map(|(v, r)| PartitionedValue::uniform(r.clone(), init(v)))
            .collect()
    };
    let zero = Bound::Finite(Weight::from_integer(0));
    let mut d = vec![row(&|v| if v == s0 { zero } else { Bound::NegInf })];
    let mut candidates = Vec::new();
    for k in 1..=n {
        let mut next = row(&|_| Bound::NegInf);
        for (u, v, guard, weight) in &local.inner {
            candidates.clear();
            for (cell, val) in d[k - 1][*u].cells() {
                if *val == Bound::NegInf || !cell.intersects(guard) {
                    continue;
                }
                candidates.push((cell.and(guard), val.plus(*weight)));
            }
            if !candidates.is_empty() {
                next[*v].improve(&candidates, |a, b| a > b);
            }
        }
        d.push(next);
    }
    d
}

fn term(dn: Bound, dk: Bound, steps: usize) -> Bound {
    match (dn, dk) {
        (Bound::NegInf, _) => Bound::NegInf,
        (Bound::Finite(a), Bound::Finite(b)) => Bound::Finite((a - b) / Weight::from_integer(steps as i64)),
        _ => Bound::PosInf,
    }
}

/// `max_v min_k (d[n][v] - d[k][v]) / (n - k)`, refined per cell.
fn best_mean<S: CellSet>(d: &[Vec<PartitionedValue<S>>], full: S) -> PartitionedValue<S> {
    let n = d.len() - 1;
    let mut c = PartitionedValue::uniform(full.clone(), Bound::NegInf);
    let mut candidates = Vec::new();
    for v in 0..d[n].len() {
        let dn = &d[n][v];
        // products with no length-n walk to v contribute nothing
        let mut reached = full.none_like();
        for (cell, value) in dn.cells() {
            if *value != Bound::NegInf {
                reached.union_with(cell);
            }
        }
        if reached.is_empty() {
            continue;
        }
        let mut m = PartitionedValue::uniform(reached, Bound::PosInf);
        for (k, row) in d[..n].iter().enumerate() {
            let steps = n - k;
            candidates.clear();
            for (c2, v2) in dn.cells() {
                if *v2 == Bound::NegInf {
                    continue;
                }
                for (c3, v3) in row[v].cells() {
                    // an unreached d[k] gives +inf, which never lowers the minimum
                    if *v3 != Bound::NegInf && c2.intersects(c3) {
                        candidates.push((c2.and(c3), term(*v2, *v3, steps)));
                    }
                }
            }
            if !candidates.is_empty() {
                m.improve(&candidates, |a, b| a < b);
            }
        }
        c.improve(m.cells(), |a, b| a > b);
    }
    c
}

/// Fills the walk table for `scc` with per-transition partition refinement.
/// `weights[t]` is the oriented weight of transition `t`.
pub fn karp_table(scc: &SymbolicScc, g: &FamilyGraph, weights: &[Weight]) -> KarpTable {
    let local = localize(scc, g, weights);
    let n = scc.size();
    KarpTable {
        n,
        anchor: scc.anchor,
        products: scc.anchor_products.clone(),
        d: fill(&local, scc.anchor.0, n),
    }
}

/// Best mean cycle of `scc` per product of its anchor set. Finite cells hold
/// the true (un-oriented) value; `NegInf` marks products for which the
/// component has no cycle.
pub fn mean_cycle_scc(scc: &SymbolicScc, g: &FamilyGraph, mode: Mode) -> PartitionedValue {
    let weights: Vec<Weight> = g.wfts.transitions().iter().map(|t| mode.orient(t.weight)).collect();
    oriented_mean_cycle(scc, g, &weights).map(|b| match b {
        Bound::Finite(w) => Bound::Finite(mode.orient(w)),
        other => other,
    })
}

/// Like [`mean_cycle_scc`] on pre-oriented weights. Components with at most
/// 64 products run on bitmask cells.
pub(crate) fn oriented_mean_cycle(scc: &SymbolicScc, g: &FamilyGraph, weights: &[Weight]) -> PartitionedValue {
    let within = &scc.anchor_products;
    let size = within.len();
    let local = localize(scc, g, weights);
    let n = scc.size();
    let c = if size <= 64 {
        let masks = Local {
            r: local.r.iter().map(to_mask).collect(),
            inner: local.inner.iter().map(|(u, v, s, w)| (*u, *v, to_mask(s), *w)).collect(),
        };
        let full = if size == 64 { u64::MAX } else { (1 << size) - 1 };
        best_mean(&fill(&masks, scc.anchor.0, n), full).convert(|m| from_mask(m, size))
    } else {
        best_mean(&fill(&local, scc.anchor.0, n), ProductSet::full(size))
    };
    c.convert(|s| s.expand(within))
}

/// The set-based path regardless of size; lets tests compare both.
#[doc(hidden)]
pub fn oriented_mean_cycle_sets(scc: &SymbolicScc, g: &FamilyGraph, weights: &[Weight]) -> PartitionedValue {
    let within = &scc.anchor_products;
    let local = localize(scc, g, weights);
    best_mean(&fill(&local, scc.anchor.0, scc.size()), ProductSet::full(within.len())).convert(|s| s.expand(within))
}

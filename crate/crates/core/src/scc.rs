//! Symbolic strongly connected components along the finishing-times tree.
//!
//! Walking the tree depth-first, each node's state seeds a reachability
//! search in the transpose graph for the products on its path that have not
//! yet been assigned to a component. The already-assigned sets travel with
//! the walk as snapshots, so backtracking restores the parent's view.

use std::fmt::Write;

use crate::feature::{FeatureModel, ProductSet};
use crate::model::{FamilyGraph, StateId, Weight, Wfts};
use crate::search::FinishingTimesTree;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedEdge {
    pub source: StateId,
    pub target: StateId,
    pub guard: ProductSet,
    pub weight: Weight,
}

/// A family graph with every edge reversed; guards and weights come along.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransposeGraph {
    state_count: usize,
    edges: Vec<GuardedEdge>,
    out: Vec<Vec<usize>>,
}

impl TransposeGraph {
    fn from_edges(state_count: usize, edges: Vec<GuardedEdge>) -> Self {
        let mut out = vec![Vec::new(); state_count];
        for (i, e) in edges.iter().enumerate() {
            out[e.source.0].push(i);
        }
        TransposeGraph {
            state_count,
            edges,
            out,
        }
    }

    /// The transpose of `g`'s underlying system.
    pub fn of(g: &FamilyGraph) -> Self {
        let edges = g
            .wfts
            .transitions()
            .iter()
            .zip(&g.guards)
            .map(|(t, guard)| GuardedEdge {
                source: t.target,
                target: t.source,
                guard: guard.clone(),
                weight: t.weight,
            })
            .collect();
        Self::from_edges(g.state_count(), edges)
    }

    pub fn transpose(&self) -> Self {
        let edges = self
            .edges
            .iter()
            .map(|e| GuardedEdge {
                source: e.target,
                target: e.source,
                ..e.clone()
            })
            .collect();
        Self::from_edges(self.state_count, edges)
    }

    pub fn edges(&self) -> &[GuardedEdge] {
        &self.edges
    }

    pub fn state_count(&self) -> usize {
        self.state_count
    }
}

/// One family-wide component: `r[s]` holds the products under which state
/// `s` belongs to it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicScc {
    pub r: Vec<ProductSet>,
    pub anchor: StateId,
    pub anchor_products: ProductSet,
}

impl SymbolicScc {
    /// Products for which this component exists.
    pub fn products(&self) -> &ProductSet {
        &self.anchor_products
    }

    /// Number of states that belong to it under some product.
    pub fn size(&self) -> usize {
        self.r.iter().filter(|s| !s.is_empty()).count()
    }

    pub fn states_at(&self, product: usize) -> Vec<StateId> {
        (0..self.r.len())
            .filter(|&s| self.r[s].contains(product))
            .map(StateId)
            .collect()
    }

    /// Products for which some transition stays inside the component.
    pub fn cyclic_products(&self, g: &FamilyGraph) -> ProductSet {
        let mut out = g.fm().none();
        for (t, guard) in g.wfts.transitions().iter().zip(&g.guards) {
            let inside = &(guard & &self.r[t.source.0]) & &self.r[t.target.0];
            out.union_with(&inside);
        }
        out
    }

    /// True when no product has a transition inside the component.
    pub fn is_trivial(&self, g: &FamilyGraph) -> bool {
        !g.wfts.transitions().iter().zip(&g.guards).any(|(t, guard)| {
            let (ru, rv) = (&self.r[t.source.0], &self.r[t.target.0]);
            ru.intersects(rv) && guard.intersects(&(ru & rv))
        })
    }
}

/// Transpose reachability from `s0` under `lambda0`, never entering a state
/// for products already assigned to a component in `assigned`.
pub fn visit_dfs_for_scc(
    s0: StateId,
    lambda0: &ProductSet,
    assigned: &[ProductSet],
    g: &TransposeGraph,
) -> SymbolicScc {
    let empty = ProductSet::empty(lambda0.universe());
    let mut r = vec![empty; g.state_count];
    r[s0.0] = lambda0.clone();
    // (state, products, next edge); an edge rejected once stays rejected
    // because the covered sets only grow
    let mut stack = vec![(s0.0, lambda0.clone(), 0usize)];
    while let Some((s, px, cursor)) = stack.last_mut() {
        let Some(&e) = g.out[*s].get(*cursor) else {
            stack.pop();
            continue;
        };
        *cursor += 1;
        let edge = &g.edges[e];
        let t = edge.target.0;
        let mut fresh = &*px & &edge.guard;
        fresh.difference_with(&assigned[t]);
        fresh.difference_with(&r[t]);
        if !fresh.is_empty() {
            r[t].union_with(&fresh);
            stack.push((t, fresh, 0));
        }
    }
    SymbolicScc {
        r,
        anchor: s0,
        anchor_products: lambda0.clone(),
    }
}

/// Components attached to finishing-times tree nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolicSccTree {
    /// Indexed by tree node; `None` where the node started no component.
    pub rc: Vec<Option<SymbolicScc>>,
    pub pushes: usize,
    pub pops: usize,
}

/// Depth-first walk of the tree computing a component wherever a node's
/// state is still unassigned for some product on its path.
pub fn symbolic_sccs(tree: &FinishingTimesTree, g: &FamilyGraph) -> SymbolicSccTree {
    let transpose = TransposeGraph::of(g);
    let fm = g.fm();
    let nodes = tree.nodes();
    let mut rc: Vec<Option<SymbolicScc>> = vec![None; nodes.len()];
    let mut visited = vec![false; nodes.len()];
    let (mut pushes, mut pops) = (0, 0);

    // The assigned sets are snapshotted per pushed node. A snapshot is kept
    // as a mark into an undo log of overwritten entries; rolling back to the
    // mark restores exactly the state at push time.
    let mut undo: Vec<(usize, ProductSet)> = Vec::new();
    for &first in &nodes[tree.root()].children {
        let mut assigned = vec![fm.none(); g.state_count()];
        let mut to_explore: Vec<(usize, ProductSet)> = vec![(first, nodes[first].label.clone())];
        let mut snapshots: Vec<usize> = vec![undo.len()];
        pushes += 1;
        while let Some((u, lambda)) = to_explore.last() {
            let u = *u;
            let s = nodes[u].state.expect("non-root").0;
            visited[u] = true;
            let fresh = lambda - &assigned[s];
            if !fresh.is_empty() {
                let scc = visit_dfs_for_scc(StateId(s), &fresh, &assigned, &transpose);
                for (state, add) in scc.r.iter().enumerate() {
                    if !add.is_empty() {
                        undo.push((state, assigned[state].clone()));
                        assigned[state].union_with(add);
                    }
                }
                rc[u] = Some(scc);
            }
            match nodes[u].children.iter().find(|&&c| !visited[c]) {
                Some(&v) => {
                    let path = lambda & &nodes[v].label;
                    to_explore.push((v, path));
                    snapshots.push(undo.len());
                    pushes += 1;
                }
                None => {
                    to_explore.pop();
                    let mark = snapshots.pop().expect("stacks move together");
                    while undo.len() > mark {
                        let (state, before) = undo.pop().expect("above mark");
                        assigned[state] = before;
                    }
                    pops += 1;
                }
            }
        }
        debug_assert!(snapshots.is_empty());
    }
    SymbolicSccTree { rc, pushes, pops }
}

impl SymbolicSccTree {
    /// Components, in discovery order, seen along `product`'s tree path.
    pub fn sccs_at<'t>(&'t self, tree: &FinishingTimesTree, product: usize) -> Vec<&'t SymbolicScc> {
        tree.path_of(product)
            .into_iter()
            .filter_map(|n| self.rc[n].as_ref())
            .filter(|scc| scc.products().contains(product))
            .collect()
    }

    /// The state partition `product` sees; members of each part ascend.
    pub fn partition_at(&self, tree: &FinishingTimesTree, product: usize) -> Vec<Vec<StateId>> {
        self.sccs_at(tree, product)
            .into_iter()
            .map(|scc| scc.states_at(product))
            .collect()
    }

    /// Every component in the tree, in node order.
    pub fn all(&self) -> impl Iterator<Item = &SymbolicScc> {
        self.rc.iter().flatten()
    }

    /// Per leaf path, the components with their state sets.
    pub fn dump(&self, tree: &FinishingTimesTree, w: &Wfts) -> String {
        let fm: &FeatureModel = w.feature_model();
        let mut out = String::new();
        for leaf in tree.leaves() {
            let mut path = Vec::new();
            let mut at = leaf;
            while let Some(parent) = tree.node(at).parent {
                path.push(at);
                at = parent;
            }
            path.reverse();
            let _ = writeln!(out, "path [{}]", fm.render(&tree.node(leaf).path));
            for n in path {
                let Some(scc) = &self.rc[n] else { continue };
                let members: Vec<String> = scc
                    .r
                    .iter()
                    .enumerate()
                    .filter(|(_, px)| px.intersects(&tree.node(leaf).path))
                    .map(|(s, px)| {
                        let px = px & &tree.node(leaf).path;
                        format!("{} [{}]", w.state_name(StateId(s)), fm.render(&px))
                    })
                    .collect();
                let _ = writeln!(out, "  {{{}}}", members.join(", "));
            }
        }
        out
    }
}

//! Feature-aware depth-first search and the symbolic finishing-times tree.
//!
//! [`dfs_fts`] runs one depth-first search for all products at once: each
//! state carries the set of products for which it is still unexplored, and
//! each finishing event is stamped for the set of products exploring the
//! state at that moment. [`build_finishing_times_tree`] turns the resulting
//! order into a tree whose root-to-leaf paths list, per family of products,
//! the states in decreasing finishing time.

use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write;

use crate::feature::{FeatureModel, ProductSet};
use crate::graph::dfs_finishing_times;
use crate::model::{FamilyGraph, StateId, Wfts};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsEntry {
    pub state: StateId,
    pub products: ProductSet,
    pub time: usize,
}

/// Finishing events of the symbolic search, ordered by time `1..=len`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfsOrder {
    entries: Vec<DfsEntry>,
}

impl DfsOrder {
    pub fn entries(&self) -> &[DfsEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The entry stamped with `time` (1-based).
    pub fn at(&self, time: usize) -> &DfsEntry {
        &self.entries[time - 1]
    }
}

struct Frame {
    state: usize,
    exploring: ProductSet,
    next_edge: usize,
}

/// Symbolic depth-first search over all products, states and out-edges in
/// declaration order. Uses an explicit stack.
pub fn dfs_fts(g: &FamilyGraph) -> DfsOrder {
    let n = g.state_count();
    let fm = g.fm();
    let mut white = vec![fm.all(); n];
    let mut entries = Vec::new();
    let mut stack: Vec<(Frame, ProductSet)> = Vec::new();

    let visit = |white: &mut Vec<ProductSet>, stack: &mut Vec<(Frame, ProductSet)>, u: usize, lambda: ProductSet| {
        let exploring = &white[u] & &lambda;
        white[u].difference_with(&lambda);
        // the whole incoming set propagates, not just the fresh part
        stack.push((
            Frame {
                state: u,
                exploring,
                next_edge: 0,
            },
            lambda,
        ));
    };

    for root in 0..n {
        if white[root].is_empty() {
            continue;
        }
        let lambda = white[root].clone();
        visit(&mut white, &mut stack, root, lambda);
        while let Some((frame, prop)) = stack.last_mut() {
            let u = frame.state;
            if let Some(&t) = g.out[u].get(frame.next_edge) {
                frame.next_edge += 1;
                let next = &g.guards[t] & prop;
                let v = g.transition(t).target.0;
                if white[v].intersects(&next) {
                    visit(&mut white, &mut stack, v, next);
                }
            } else {
                let (frame, _) = stack.pop().expect("non-empty");
                entries.push(DfsEntry {
                    state: StateId(frame.state),
                    products: frame.exploring,
                    time: entries.len() + 1,
                });
            }
        }
    }
    DfsOrder { entries }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeNode {
    /// `None` only for the root.
    pub state: Option<StateId>,
    pub parent: Option<usize>,
    /// Label of the edge from the parent (all products for the root).
    pub label: ProductSet,
    /// Conjunction of the edge labels from the root.
    pub path: ProductSet,
    /// Time of the order entry this node was created from.
    pub max_order: usize,
    pub depth: usize,
    pub children: Vec<usize>,
}

/// The symbolic finishing-times tree; node 0 is the root.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinishingTimesTree {
    nodes: Vec<TreeNode>,
}

/// Breadth-first construction from a symbolic DFS order.
pub fn build_finishing_times_tree(order: &DfsOrder, fm: &FeatureModel) -> FinishingTimesTree {
    let mut nodes = vec![TreeNode {
        state: None,
        parent: None,
        label: fm.all(),
        path: fm.all(),
        // one past the last time, so the scan below starts at the last entry
        max_order: order.len() + 1,
        depth: 0,
        children: Vec::new(),
    }];
    let mut queue = VecDeque::from([0]);
    while let Some(id) = queue.pop_front() {
        let path = nodes[id].path.clone();
        let mut not_children = fm.all();
        // path ∧ notChildren, kept in step with notChildren
        let mut open = path.clone();
        let mut j = nodes[id].max_order - 1;
        while j > 0 && !open.is_empty() {
            let entry = order.at(j);
            if entry.products.intersects(&open) {
                let label = &entry.products & &not_children;
                let child = TreeNode {
                    state: Some(entry.state),
                    parent: Some(id),
                    path: &label & &path,
                    label,
                    max_order: j,
                    depth: nodes[id].depth + 1,
                    children: Vec::new(),
                };
                nodes.push(child);
                let child_id = nodes.len() - 1;
                nodes[id].children.push(child_id);
                queue.push_back(child_id);
                not_children.difference_with(&entry.products);
                open.difference_with(&entry.products);
            }
            j -= 1;
        }
    }
    FinishingTimesTree { nodes }
}

impl FinishingTimesTree {
    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, id: usize) -> &TreeNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> usize {
        0
    }

    pub fn leaves(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nodes.len()).filter(|&i| self.nodes[i].children.is_empty())
    }

    /// Node ids from the root's child down to a leaf, following the unique
    /// child whose label contains `product`.
    pub fn path_of(&self, product: usize) -> Vec<usize> {
        let mut path = Vec::new();
        let mut at = self.root();
        while let Some(&next) = self.nodes[at]
            .children
            .iter()
            .find(|&&c| self.nodes[c].label.contains(product))
        {
            path.push(next);
            at = next;
        }
        path
    }

    /// States along `product`'s path, highest finishing time first.
    pub fn states_of(&self, product: usize) -> Vec<StateId> {
        self.path_of(product)
            .into_iter()
            .map(|n| self.nodes[n].state.expect("non-root"))
            .collect()
    }

    /// Indented text dump: one line per node with state and edge label.
    pub fn dump(&self, w: &Wfts) -> String {
        let fm = w.feature_model();
        let mut out = String::new();
        let mut stack = vec![self.root()];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            match node.state {
                None => out.push_str("root\n"),
                Some(s) => {
                    let _ = writeln!(
                        out,
                        "{}{} [{}]",
                        "  ".repeat(node.depth),
                        w.state_name(s),
                        fm.render(&node.label)
                    );
                }
            }
            stack.extend(node.children.iter().rev());
        }
        out
    }

    /// Graphviz rendering.
    pub fn to_dot(&self, w: &Wfts) -> String {
        let fm = w.feature_model();
        let mut out = String::from("digraph finishing_times {\n");
        for (id, node) in self.nodes.iter().enumerate() {
            let name = node.state.map_or("root", |s| w.state_name(s));
            let _ = writeln!(out, "  n{id} [label=\"{name}\"];");
            if let Some(p) = node.parent {
                let _ = writeln!(out, "  n{p} -> n{id} [label=\"{}\"];", fm.render(&node.label));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// Checks the five defining conditions of a symbolic finishing-times tree
/// against `w` (which must be the model the tree was built from). Returns a
/// description of every violation found.
pub fn check_tree(tree: &FinishingTimesTree, w: &Wfts) -> Vec<String> {
    let mut violations = Vec::new();
    let nodes = tree.nodes();
    let n = w.state_count();
    let fm = w.feature_model();

    for leaf in tree.leaves() {
        if nodes[leaf].depth != n {
            violations.push(format!("leaf {leaf} at depth {} instead of {n}", nodes[leaf].depth));
        }
        let mut seen = BTreeSet::new();
        let mut at = leaf;
        while let Some(s) = nodes[at].state {
            if !seen.insert(s) {
                violations.push(format!("state {} repeats on the path to leaf {leaf}", w.state_name(s)));
            }
            at = nodes[at].parent.expect("non-root has a parent");
        }
    }

    for (id, node) in nodes.iter().enumerate() {
        for (i, &a) in node.children.iter().enumerate() {
            for &b in &node.children[i + 1..] {
                if nodes[a].label.intersects(&nodes[b].label) {
                    violations.push(format!("children {a} and {b} of node {id} overlap"));
                }
            }
        }
    }

    // path conjunctions recomputed from edge labels alone
    let mut conj = vec![fm.all(); nodes.len()];
    for (id, node) in nodes.iter().enumerate().skip(1) {
        conj[id] = &conj[node.parent.expect("non-root")] & &node.label;
    }
    for (p, product) in fm.products().iter().enumerate() {
        for depth in 1..=n {
            let hits = (0..nodes.len())
                .filter(|&id| nodes[id].depth == depth && conj[id].contains(p))
                .count();
            if hits != 1 {
                violations.push(format!(
                    "product {} lies on {hits} paths at depth {depth}",
                    fm.format_product(*product)
                ));
            }
        }
        let finish = dfs_finishing_times(&w.project(*product).expect("valid product"));
        for (i, s) in tree.states_of(p).iter().enumerate() {
            if finish[s.0] != n - i {
                violations.push(format!(
                    "product {}: state {} has finishing time {} but sits at depth {}",
                    fm.format_product(*product),
                    w.state_name(*s),
                    finish[s.0],
                    i + 1
                ));
            }
        }
    }
    violations
}

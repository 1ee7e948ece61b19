//! Classic single-product graph algorithms under the canonical iteration
//! order: states in declaration order, out-edges in declaration order.

use crate::model::{ProjectedWts, StateId};

/// Depth-first search finishing times (1-based), indexed by state.
pub fn dfs_finishing_times(g: &ProjectedWts) -> Vec<usize> {
    let out = g.out_edges();
    let n = g.state_count;
    let mut visited = vec![false; n];
    let mut finish = vec![0; n];
    let mut time = 0;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        stack.push((root, 0));
        while let Some((u, next)) = stack.last_mut() {
            let u = *u;
            if let Some(&e) = out[u].get(*next) {
                *next += 1;
                let v = g.edges[e].target.0;
                if !visited[v] {
                    visited[v] = true;
                    stack.push((v, 0));
                }
            } else {
                time += 1;
                finish[u] = time;
                stack.pop();
            }
        }
    }
    finish
}

/// Strongly connected components by Kosaraju's two-pass algorithm, in the
/// order they are discovered; members of each component ascend.
pub fn kosaraju(g: &ProjectedWts) -> Vec<Vec<StateId>> {
    let n = g.state_count;
    let finish = dfs_finishing_times(g);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&s| std::cmp::Reverse(finish[s]));

    let mut incoming = vec![Vec::new(); n];
    for e in &g.edges {
        incoming[e.target.0].push(e.source.0);
    }
    let mut assigned = vec![false; n];
    let mut components = Vec::new();
    for s in order {
        if assigned[s] {
            continue;
        }
        assigned[s] = true;
        let mut component = vec![StateId(s)];
        let mut stack = vec![s];
        while let Some(u) = stack.pop() {
            for &p in &incoming[u] {
                if !assigned[p] {
                    assigned[p] = true;
                    component.push(StateId(p));
                    stack.push(p);
                }
            }
        }
        component.sort();
        components.push(component);
    }
    components
}

/// True when the component contains a cycle: more than one state, or a
/// self-loop.
pub fn is_cyclic_component(g: &ProjectedWts, component: &[StateId]) -> bool {
    component.len() > 1
        || g
            .edges
            .iter()
            .any(|e| e.source == component[0] && e.target == component[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feature::Product;
    use crate::io::generators::grant_request;
    use crate::model::Weight;

    #[test]
    fn grant_request_finishing_times() {
        let w = grant_request();
        // basic product: F(s3)=1, F(s1)=2, F(s0)=3, F(s2)=4
        let f = dfs_finishing_times(&w.project(Product(0)).unwrap());
        assert_eq!(f, [3, 2, 4, 1]);
        // with A: s2 finishes third and s0 last
        let a = w.feature_model().product_from_names(&["A"]).unwrap();
        let f = dfs_finishing_times(&w.project(a).unwrap());
        assert_eq!(f, [4, 2, 3, 1]);
    }

    #[test]
    fn kosaraju_components() {
        let w = grant_request();
        let comps = kosaraju(&w.project(Product(0)).unwrap());
        assert_eq!(comps, vec![vec![StateId(2)], vec![StateId(0), StateId(1), StateId(3)]]);
        let all = w.feature_model().product_from_names(&["G", "A"]).unwrap();
        let comps = kosaraju(&w.project(all).unwrap());
        assert_eq!(comps.len(), 1);
    }

    #[test]
    fn trivial_components() {
        let z = Weight::from_integer(0);
        let g = ProjectedWts::from_edges(3, &[(0, 1, z), (2, 2, z)]);
        let comps = kosaraju(&g);
        assert_eq!(comps.len(), 3);
        let cyclic: Vec<bool> = comps.iter().map(|c| is_cyclic_component(&g, c)).collect();
        assert_eq!(cyclic, [true, false, false]);
    }
}

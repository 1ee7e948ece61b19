use std::collections::VecDeque;

use thiserror::Error;

use crate::model::{ProjectedWts, StateId, Weight};

use super::partition::Bound;
use super::Mode;

/// Karp's walk table `d[k][v]` for `k = 0..=n` from `source`, over oriented
/// weights (negated in min mode).
pub fn classic_karp_table(g: &ProjectedWts, source: StateId, n: usize, mode: Mode) -> Vec<Vec<Bound>> {
    let mut d = vec![vec![Bound::NegInf; g.state_count]; n + 1];
    d[0][source.0] = Bound::Finite(Weight::from_integer(0));
    for k in 1..=n {
        for e in &g.edges {
            let cand = d[k - 1][e.source.0].plus(mode.orient(e.weight));
            if cand > d[k][e.target.0] {
                d[k][e.target.0] = cand;
            }
        }
    }
    d
}

/// Best mean cycle of a strongly connected graph with unit-length edges;
/// `None` when it has no edges. States without incident edges are ignored.
pub fn classic_karp(g: &ProjectedWts, mode: Mode) -> Option<Weight> {
    let mut member = vec![false; g.state_count];
    for e in &g.edges {
        member[e.source.0] = true;
        member[e.target.0] = true;
    }
    let source = member.iter().position(|&m| m)?;
    let n = member.iter().filter(|&&m| m).count();
    let d = classic_karp_table(g, StateId(source), n, mode);
    let mut best: Option<Weight> = None;
    for v in (0..g.state_count).filter(|&v| member[v]) {
        let Bound::Finite(dn) = d[n][v] else { continue };
        let worst = (0..n)
            .filter_map(|k| d[k][v].finite().map(|dk| (dn - dk) / Weight::from_integer((n - k) as i64)))
            .min();
        if let Some(m) = worst {
            best = Some(best.map_or(m, |b| b.max(m)));
        }
    }
    best.map(|b| mode.orient(b))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("graph has {0} states; the cycle enumerator accepts at most 64")]
    TooManyStates(usize),
    #[error("cycle enumeration exceeded its step budget")]
    Budget,
}

const STEP_BUDGET: u64 = 50_000_000;

/// Best mean over all simple cycles, with each edge counting its length.
/// Enumerates every simple cycle exactly once (rooted at its smallest
/// state), so it is only usable on small graphs.
pub fn brute_force_mean_cycle(g: &ProjectedWts, mode: Mode) -> Result<Option<Weight>, OracleError> {
    let n = g.state_count;
    if n > 64 {
        return Err(OracleError::TooManyStates(n));
    }
    let out = g.out_edges();
    let mut best: Option<Weight> = None;
    let mut steps = 0u64;
    for root in 0..n {
        let mut on_path = vec![false; n];
        on_path[root] = true;
        // (state, next edge index, weight so far, length so far)
        let mut stack = vec![(root, 0usize, Weight::from_integer(0), 0i64)];
        while let Some(top) = stack.last_mut() {
            steps += 1;
            if steps > STEP_BUDGET {
                return Err(OracleError::Budget);
            }
            let (u, i, sum, len) = (top.0, top.1, top.2, top.3);
            let Some(&e) = out[u].get(i) else {
                on_path[u] = false;
                stack.pop();
                continue;
            };
            top.1 += 1;
            let edge = &g.edges[e];
            let v = edge.target.0;
            let (sum, len) = (sum + edge.weight, len + edge.length as i64);
            if v == root {
                let mean = sum / Weight::from_integer(len);
                best = Some(match best {
                    Some(b) if !mode.better(mean, b) => b,
                    _ => mean,
                });
            } else if v > root && !on_path[v] {
                on_path[v] = true;
                stack.push((v, 0, sum, len));
            }
        }
    }
    Ok(best)
}

/// The lexicographically smallest cycle (by state index, rotated to start
/// at its smallest state) whose mean equals `value`, or `None` if no cycle
/// attains it. `value` must be the optimum for `mode`.
pub fn witness_cycle(g: &ProjectedWts, value: Weight, mode: Mode) -> Option<Vec<StateId>> {
    let n = g.state_count;
    let target = mode.orient(value);
    let reduced: Vec<Weight> = g
        .edges
        .iter()
        .map(|e| mode.orient(e.weight) - target * Weight::from_integer(e.length as i64))
        .collect();
    // longest-path potentials; optimal cycles are exactly the zero cycles
    let mut pi = vec![Weight::from_integer(0); n];
    let mut settled = false;
    for _ in 0..=n {
        let mut changed = false;
        for (e, w) in g.edges.iter().zip(&reduced) {
            let cand = pi[e.source.0] + w;
            if cand > pi[e.target.0] {
                pi[e.target.0] = cand;
                changed = true;
            }
        }
        if !changed {
            settled = true;
            break;
        }
    }
    if !settled {
        return None;
    }
    let mut tight = vec![Vec::new(); n];
    for (e, w) in g.edges.iter().zip(&reduced) {
        if pi[e.source.0] + w == pi[e.target.0] {
            tight[e.source.0].push(e.target.0);
        }
    }
    for succ in &mut tight {
        succ.sort_unstable();
        succ.dedup();
    }
    // can `from` reach `goal` using states >= floor that are not blocked?
    let reaches = |from: usize, goal: usize, floor: usize, blocked: &[bool]| {
        if from == goal {
            return true;
        }
        let mut seen = blocked.to_vec();
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in &tight[u] {
                if v == goal {
                    return true;
                }
                if v >= floor && !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        false
    };
    let none = vec![false; n];
    let start = (0..n).find(|&s| tight[s].iter().any(|&v| v >= s && reaches(v, s, s, &none)))?;
    let mut cycle = vec![start];
    let mut blocked = vec![false; n];
    blocked[start] = true;
    let mut at = start;
    while !tight[at].contains(&start) {
        at = *tight[at]
            .iter()
            .find(|&&v| v > start && !blocked[v] && reaches(v, start, start, &blocked))?;
        blocked[at] = true;
        cycle.push(at);
    }
    Some(cycle.into_iter().map(StateId).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(n: i64) -> Weight {
        Weight::from_integer(n)
    }

    #[test]
    fn two_cycle_mean() {
        let g = ProjectedWts::from_edges(2, &[(0, 1, int(3)), (1, 0, int(1))]);
        assert_eq!(classic_karp(&g, Mode::Max), Some(int(2)));
        assert_eq!(classic_karp(&g, Mode::Min), Some(int(2)));
        assert_eq!(brute_force_mean_cycle(&g, Mode::Max), Ok(Some(int(2))));
    }

    #[test]
    fn no_edges_no_cycle() {
        let g = ProjectedWts::from_edges(3, &[]);
        assert_eq!(classic_karp(&g, Mode::Max), None);
        let dag = ProjectedWts::from_edges(3, &[(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(5))]);
        assert_eq!(brute_force_mean_cycle(&dag, Mode::Max), Ok(None));
        assert_eq!(witness_cycle(&dag, int(0), Mode::Max), None);
    }

    #[test]
    fn two_loops_through_a_hub() {
        // 0 -> 1 -> 0 mean 5, 0 -> 2 -> 0 mean 1, self-loop at 2 of -3
        let g = ProjectedWts::from_edges(
            3,
            &[(0, 1, int(6)), (1, 0, int(4)), (0, 2, int(2)), (2, 0, int(0)), (2, 2, int(-3))],
        );
        assert_eq!(classic_karp(&g, Mode::Max), Some(int(5)));
        assert_eq!(classic_karp(&g, Mode::Min), Some(int(-3)));
        assert_eq!(brute_force_mean_cycle(&g, Mode::Min), Ok(Some(int(-3))));
        assert_eq!(witness_cycle(&g, int(5), Mode::Max), Some(vec![StateId(0), StateId(1)]));
        assert_eq!(witness_cycle(&g, int(-3), Mode::Min), Some(vec![StateId(2)]));
    }

    #[test]
    fn witness_prefers_smallest_successor() {
        // 0->1->3->0 and 0->2->3->0 both mean 1
        let g = ProjectedWts::from_edges(
            4,
            &[(0, 2, int(1)), (0, 1, int(1)), (1, 3, int(1)), (2, 3, int(1)), (3, 0, int(1))],
        );
        assert_eq!(
            witness_cycle(&g, int(1), Mode::Max),
            Some(vec![StateId(0), StateId(1), StateId(3)])
        );
        assert_eq!(witness_cycle(&g, int(2), Mode::Max), None);
    }

    #[test]
    fn brute_force_counts_lengths() {
        let mut g = ProjectedWts::from_edges(2, &[(0, 1, int(6)), (1, 0, int(0))]);
        g.edges[0].length = 3;
        assert_eq!(brute_force_mean_cycle(&g, Mode::Max), Ok(Some(Weight::new(3, 2))));
    }

    #[test]
    fn size_guard() {
        let g = ProjectedWts::from_edges(65, &[]);
        assert_eq!(brute_force_mean_cycle(&g, Mode::Max), Err(OracleError::TooManyStates(65)));
    }
}

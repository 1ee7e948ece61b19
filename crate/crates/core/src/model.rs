//! Weighted featured transition systems.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use num_rational::Rational64;
use thiserror::Error;

use crate::feature::{is_identifier, FeatureError, FeatureExpr, FeatureModel, Product, ProductSet};

/// Exact transition weight.
pub type Weight = Rational64;

/// Marker inside the names of states introduced by [`Wfts::expand_lengths`].
pub const INTERMEDIATE_MARK: char = '#';

pub const DEFAULT_ACTION: &str = "tau";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error("undeclared state `{0}`")]
    UndeclaredState(String),
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("`{0}` is not a valid state name")]
    InvalidStateName(String),
    #[error("`{0}` is not a valid action name")]
    InvalidActionName(String),
    #[error("a model needs at least one state")]
    NoStates,
    #[error("a model needs at least one initial state")]
    NoInitialState,
    #[error("transition {0} has length 0")]
    ZeroLength(usize),
    #[error("guard of transition {index}: {source}")]
    Guard {
        index: usize,
        #[source]
        source: FeatureError,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: StateId,
    pub action: String,
    pub target: StateId,
    pub guard: FeatureExpr,
    pub weight: Weight,
    pub length: u32,
}

/// A weighted featured transition system. Validated on construction and
/// immutable afterwards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Wfts {
    states: Vec<String>,
    transitions: Vec<Transition>,
    initial: Vec<StateId>,
    features: FeatureModel,
}

impl Wfts {
    pub fn new(
        states: Vec<String>,
        transitions: Vec<Transition>,
        initial: Vec<StateId>,
        features: FeatureModel,
    ) -> Result<Self, ModelError> {
        let mut seen = HashMap::new();
        for name in &states {
            if !is_identifier(name) {
                return Err(ModelError::InvalidStateName(name.clone()));
            }
            if seen.insert(name.as_str(), ()).is_some() {
                return Err(ModelError::DuplicateState(name.clone()));
            }
        }
        for t in &transitions {
            if !is_identifier(&t.action) {
                return Err(ModelError::InvalidActionName(t.action.clone()));
            }
        }
        Self::checked(states, transitions, initial, features)
    }

    fn checked(
        states: Vec<String>,
        transitions: Vec<Transition>,
        initial: Vec<StateId>,
        features: FeatureModel,
    ) -> Result<Self, ModelError> {
        if states.is_empty() {
            return Err(ModelError::NoStates);
        }
        if initial.is_empty() {
            return Err(ModelError::NoInitialState);
        }
        let n = states.len();
        let undeclared = |s: StateId| ModelError::UndeclaredState(format!("#{}", s.0));
        if let Some(s) = initial.iter().find(|s| s.0 >= n) {
            return Err(undeclared(*s));
        }
        for (index, t) in transitions.iter().enumerate() {
            if t.source.0 >= n {
                return Err(undeclared(t.source));
            }
            if t.target.0 >= n {
                return Err(undeclared(t.target));
            }
            if t.length == 0 {
                return Err(ModelError::ZeroLength(index));
            }
            features
                .check_expr(&t.guard)
                .map_err(|source| ModelError::Guard { index, source })?;
        }
        Ok(Wfts {
            states,
            transitions,
            initial,
            features,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn state_count(&self) -> usize {
        self.states.len()
    }

    pub fn state_name(&self, s: StateId) -> &str {
        &self.states[s.0]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name).map(StateId)
    }

    /// True for states introduced by length expansion.
    pub fn is_intermediate(&self, s: StateId) -> bool {
        self.states[s.0].contains(INTERMEDIATE_MARK)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn feature_model(&self) -> &FeatureModel {
        &self.features
    }

    pub fn actions(&self) -> BTreeSet<&str> {
        self.transitions.iter().map(|t| t.action.as_str()).collect()
    }

    pub fn has_unit_lengths(&self) -> bool {
        self.transitions.iter().all(|t| t.length == 1)
    }

    /// The weighted transition system of one product: every transition whose
    /// guard the product satisfies, in declaration order. States are kept.
    pub fn project(&self, product: Product) -> Result<ProjectedWts, ModelError> {
        if self.features.product_index(product).is_none() {
            return Err(FeatureError::InvalidProduct(self.features.format_product(product)).into());
        }
        let edges = self
            .transitions
            .iter()
            .enumerate()
            .filter(|(_, t)| self.features.eval(&t.guard, product))
            .map(|(i, t)| Edge {
                source: t.source,
                target: t.target,
                weight: t.weight,
                length: t.length,
                transition: i,
            })
            .collect();
        Ok(ProjectedWts {
            state_count: self.states.len(),
            edges,
            initial: self.initial.clone(),
        })
    }

    /// Replaces every transition of length `k > 1` by a chain of `k` unit
    /// transitions through fresh states named `src->tgt#i`. The first hop
    /// keeps the guard, action and full weight; the rest are unguarded
    /// `tau` hops of weight 0.
    pub fn expand_lengths(&self) -> Wfts {
        if self.has_unit_lengths() {
            return self.clone();
        }
        let mut states = self.states.clone();
        let mut transitions = Vec::with_capacity(self.transitions.len());
        let mut counters: HashMap<(StateId, StateId), usize> = HashMap::new();
        for t in &self.transitions {
            if t.length == 1 {
                transitions.push(t.clone());
                continue;
            }
            let mut prev = t.source;
            for hop in 0..t.length {
                let next = if hop + 1 == t.length {
                    t.target
                } else {
                    let counter = counters.entry((t.source, t.target)).or_insert(0);
                    *counter += 1;
                    states.push(format!(
                        "{}->{}{}{}",
                        self.states[t.source.0], self.states[t.target.0], INTERMEDIATE_MARK, counter
                    ));
                    StateId(states.len() - 1)
                };
                let first = hop == 0;
                transitions.push(Transition {
                    source: prev,
                    action: if first { t.action.clone() } else { DEFAULT_ACTION.to_string() },
                    target: next,
                    guard: if first { t.guard.clone() } else { FeatureExpr::True },
                    weight: if first { t.weight } else { Weight::from_integer(0) },
                    length: 1,
                });
                prev = next;
            }
        }
        Wfts::checked(states, transitions, self.initial.clone(), self.features.clone())
            .expect("length expansion preserves validity")
    }

    /// The same system with every weight replaced by `f(weight)`.
    pub fn map_weights(&self, f: impl Fn(Weight) -> Weight) -> Wfts {
        let mut w = self.clone();
        for t in &mut w.transitions {
            t.weight = f(t.weight);
        }
        w
    }

    /// For each state, the products under which it is reachable from an
    /// initial state.
    pub fn symbolic_reachable(&self) -> Vec<ProductSet> {
        FamilyGraph::new(self).reachable()
    }
}

/// One edge of a projected system, remembering the transition it came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: StateId,
    pub target: StateId,
    pub weight: Weight,
    pub length: u32,
    pub transition: usize,
}

/// A plain weighted transition system (guards erased).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectedWts {
    pub state_count: usize,
    pub edges: Vec<Edge>,
    pub initial: Vec<StateId>,
}

impl ProjectedWts {
    /// Builds a graph directly from `(source, target, weight)` triples.
    pub fn from_edges(state_count: usize, edges: &[(usize, usize, Weight)]) -> Self {
        ProjectedWts {
            state_count,
            edges: edges
                .iter()
                .enumerate()
                .map(|(i, &(s, t, w))| Edge {
                    source: StateId(s),
                    target: StateId(t),
                    weight: w,
                    length: 1,
                    transition: i,
                })
                .collect(),
            initial: vec![StateId(0)],
        }
    }

    /// Outgoing edge indices per state, in edge order.
    pub fn out_edges(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.state_count];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.source.0].push(i);
        }
        out
    }

    /// States reachable from the initial states.
    pub fn reachable(&self) -> Vec<bool> {
        let out = self.out_edges();
        let mut seen = vec![false; self.state_count];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for s in &self.initial {
            if !seen[s.0] {
                seen[s.0] = true;
                queue.push_back(s.0);
            }
        }
        while let Some(u) = queue.pop_front() {
            for &e in &out[u] {
                let v = self.edges[e].target.0;
                if !seen[v] {
                    seen[v] = true;
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    /// The subgraph induced by `keep`, same state numbering.
    pub fn restrict(&self, keep: &[bool]) -> ProjectedWts {
        ProjectedWts {
            state_count: self.state_count,
            edges: self
                .edges
                .iter()
                .filter(|e| keep[e.source.0] && keep[e.target.0])
                .cloned()
                .collect(),
            initial: self.initial.iter().copied().filter(|s| keep[s.0]).collect(),
        }
    }
}

/// A [`Wfts`] with guards denoted as product sets and adjacency precomputed;
/// the form every symbolic algorithm consumes.
#[derive(Debug, Clone)]
pub struct FamilyGraph<'a> {
    pub wfts: &'a Wfts,
    pub guards: Vec<ProductSet>,
    pub out: Vec<Vec<usize>>,
    pub incoming: Vec<Vec<usize>>,
}

impl<'a> FamilyGraph<'a> {
    pub fn new(wfts: &'a Wfts) -> Self {
        let fm = wfts.feature_model();
        let guards = wfts
            .transitions()
            .iter()
            .map(|t| fm.denote(&t.guard).expect("guards are validated"))
            .collect();
        let mut out = vec![Vec::new(); wfts.state_count()];
        let mut incoming = vec![Vec::new(); wfts.state_count()];
        for (i, t) in wfts.transitions().iter().enumerate() {
            out[t.source.0].push(i);
            incoming[t.target.0].push(i);
        }
        FamilyGraph {
            wfts,
            guards,
            out,
            incoming,
        }
    }

    pub fn state_count(&self) -> usize {
        self.out.len()
    }

    pub fn fm(&self) -> &FeatureModel {
        self.wfts.feature_model()
    }

    pub fn transition(&self, i: usize) -> &Transition {
        &self.wfts.transitions()[i]
    }

    /// Forward symbolic reachability from the initial states.
    pub fn reachable(&self) -> Vec<ProductSet> {
        let fm = self.fm();
        let mut reach = vec![fm.none(); self.state_count()];
        let mut queue = VecDeque::new();
        for s in self.wfts.initial() {
            reach[s.0] = fm.all();
            queue.push_back(s.0);
        }
        while let Some(u) = queue.pop_front() {
            for &t in &self.out[u] {
                let v = self.transition(t).target.0;
                let add = &reach[u] & &self.guards[t];
                if !add.is_subset(&reach[v]) {
                    reach[v].union_with(&add);
                    queue.push_back(v);
                }
            }
        }
        reach
    }
}

impl fmt::Display for Wfts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::io::serialize(self))
    }
}

/// Incremental construction of a [`Wfts`] by state name.
#[derive(Debug, Clone, Default)]
pub struct WftsBuilder {
    features: Vec<String>,
    constraint: Option<FeatureExpr>,
    states: Vec<String>,
    initial: Vec<String>,
    transitions: Vec<PendingTransition>,
}

#[derive(Debug, Clone)]
struct PendingTransition {
    source: String,
    target: String,
    guard: FeatureExpr,
    action: String,
    weight: Weight,
    length: u32,
}

impl WftsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn feature(mut self, name: impl Into<String>) -> Self {
        self.features.push(name.into());
        self
    }

    pub fn constraint(mut self, e: FeatureExpr) -> Self {
        self.constraint = Some(e);
        self
    }

    pub fn state(mut self, name: impl Into<String>) -> Self {
        self.states.push(name.into());
        self
    }

    pub fn initial(mut self, name: impl Into<String>) -> Self {
        self.initial.push(name.into());
        self
    }

    #[allow(clippy::too_many_arguments)]
    pub fn transition(
        mut self,
        source: impl Into<String>,
        action: impl Into<String>,
        target: impl Into<String>,
        guard: FeatureExpr,
        weight: i64,
        length: u32,
    ) -> Self {
        self.transitions.push(PendingTransition {
            source: source.into(),
            target: target.into(),
            guard,
            action: action.into(),
            weight: Weight::from_integer(weight),
            length,
        });
        self
    }

    pub fn build(self) -> Result<Wfts, ModelError> {
        let fm = FeatureModel::new(self.features, self.constraint.unwrap_or(FeatureExpr::True))?;
        let index: HashMap<&str, StateId> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), StateId(i)))
            .collect();
        let lookup = |name: &str| {
            index
                .get(name)
                .copied()
                .ok_or_else(|| ModelError::UndeclaredState(name.to_string()))
        };
        let initial = self
            .initial
            .iter()
            .map(|s| lookup(s))
            .collect::<Result<Vec<_>, _>>()?;
        let transitions = self
            .transitions
            .iter()
            .map(|t| {
                Ok(Transition {
                    source: lookup(&t.source)?,
                    action: t.action.clone(),
                    target: lookup(&t.target)?,
                    guard: t.guard.clone(),
                    weight: t.weight,
                    length: t.length,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Wfts::new(self.states.clone(), transitions, initial, fm)
    }
}

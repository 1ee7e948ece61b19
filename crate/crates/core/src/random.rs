//! Seeded random models for differential testing.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::feature::{FeatureExpr, FeatureModel};
use crate::model::{Transition, Weight, Wfts, StateId};

/// Size limits for [`random_wfts`].
#[derive(Debug, Clone, Copy)]
pub struct RandomShape {
    pub max_states: usize,
    pub max_features: usize,
    pub max_weight: i64,
    pub max_length: u32,
    /// Expected out-degree per state.
    pub density: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        RandomShape {
            max_states: 8,
            max_features: 4,
            max_weight: 10,
            max_length: 3,
            density: 1.8,
        }
    }
}

fn random_expr(rng: &mut impl Rng, features: &[String], depth: u32) -> FeatureExpr {
    if depth == 0 || rng.random_bool(0.4) {
        let v = FeatureExpr::var(features[rng.random_range(0..features.len())].clone());
        return if rng.random_bool(0.3) { !v } else { v };
    }
    let a = random_expr(rng, features, depth - 1);
    let b = random_expr(rng, features, depth - 1);
    match rng.random_range(0..3) {
        0 => a & b,
        1 => a | b,
        _ => !(a & b),
    }
}

/// A random system with features `F0..`, states `q0..` and initial state
/// `q0`. Guards are `true` about 40% of the time; a quarter of the models
/// carry a constraint (dropped again if it has no solutions).
pub fn random_wfts(rng: &mut impl Rng, shape: RandomShape) -> Wfts {
    let n = rng.random_range(1..=shape.max_states);
    let k = rng.random_range(0..=shape.max_features);
    let features: Vec<String> = (0..k).map(|i| format!("F{i}")).collect();
    let constraint = if k > 0 && rng.random_bool(0.25) {
        random_expr(rng, &features, 2)
    } else {
        FeatureExpr::True
    };
    let fm = FeatureModel::new(features.clone(), constraint)
        .or_else(|_| FeatureModel::new(features.clone(), FeatureExpr::True))
        .expect("unconstrained model has products");

    let edges = ((n as f64) * shape.density).round() as usize;
    let transitions = (0..edges)
        .map(|_| Transition {
            source: StateId(rng.random_range(0..n)),
            action: ["a", "b", "c"][rng.random_range(0..3)].to_string(),
            target: StateId(rng.random_range(0..n)),
            guard: if k == 0 || rng.random_bool(0.4) {
                FeatureExpr::True
            } else {
                random_expr(rng, &features, 2)
            },
            weight: Weight::from_integer(rng.random_range(-shape.max_weight..=shape.max_weight)),
            length: if rng.random_bool(0.7) {
                1
            } else {
                rng.random_range(1..=shape.max_length)
            },
        })
        .collect();
    let states = (0..n).map(|i| format!("q{i}")).collect();
    Wfts::new(states, transitions, vec![StateId(0)], fm).expect("random model is well-formed")
}

/// `count` models from a ChaCha stream seeded with `seed`.
pub fn random_corpus(seed: u64, count: usize, shape: RandomShape) -> Vec<Wfts> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_wfts(&mut rng, shape)).collect()
}

#![allow(dead_code)]

use meetimp::sample::{random_formula, random_model};
use meetimp::{ColouredModel, Formula};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// A random model drawn from a proptest-chosen seed.
pub fn models(max_points: usize, max_vars: usize) -> impl Strategy<Value = ColouredModel> {
    (any::<u64>(), 1..=max_vars)
        .prop_map(move |(seed, n)| random_model(&mut ChaCha8Rng::seed_from_u64(seed), max_points, n))
}

/// A model together with a handful of formulas over its variables.
pub fn models_with_formulas(
    max_points: usize,
    max_vars: usize,
    depth: usize,
    meet_implication: bool,
) -> impl Strategy<Value = (ColouredModel, Vec<Formula>)> {
    (models(max_points, max_vars), any::<u64>()).prop_map(move |(m, seed)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let formulas = (0..4).map(|_| random_formula(&mut rng, m.num_vars(), depth, meet_implication)).collect();
        (m, formulas)
    })
}

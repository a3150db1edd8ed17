//! Shared inputs for the benchmarks.

use qualgame_core::generate::{random_game, random_query, rng, GameShape};
use qualgame_core::{FragmentClass, Query, StochasticGame};

/// `count` seeded games with queries from `fragment`.
pub fn corpus(
    count: u64,
    shape: &GameShape,
    fragment: FragmentClass,
    max_targets: usize,
) -> Vec<(StochasticGame, Query)> {
    (0..count)
        .map(|seed| {
            let mut r = rng(seed);
            let g = random_game(&mut r, shape);
            let q = random_query(&mut r, g.num_states(), fragment, max_targets);
            (g, q)
        })
        .collect()
}

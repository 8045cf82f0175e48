//! Fixture builders shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gospal_core::graph::{generate_configuration_model, DegreeDistribution};
use gospal_core::{BidVector, ConflictGraph};

/// Max-degree-4 configuration-model graph, the regime the simulator targets.
pub fn degree_capped_graph(n: usize, seed: u64) -> ConflictGraph {
    let dist = DegreeDistribution::uniform(vec![1, 2, 3, 4]).expect("valid pmf");
    generate_configuration_model(n, &dist, seed).expect("realizable at these sizes")
}

pub fn uniform_bids(n: usize, lo: f64, hi: f64, seed: u64) -> BidVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    BidVector::new((0..n).map(|_| rng.gen_range(lo..=hi)).collect()).expect("positive bids")
}

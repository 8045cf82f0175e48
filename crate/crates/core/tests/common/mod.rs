//! Shared fixtures and independent oracles for integration tests.
//!
//! The oracles deliberately avoid the library's solver and ordering code:
//! they enumerate subsets and permutations with their own routines so that
//! agreement is meaningful.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use gospal_core::{BidVector, ConflictGraph, GroupPartition, ValueVector};

/// Edges of the six-user worked example.
pub const EXAMPLE_EDGES: [(usize, usize); 5] = [(1, 2), (2, 3), (3, 4), (3, 5), (5, 6)];
/// Bids of the worked example.
pub const EXAMPLE_BIDS: [f64; 6] = [5.0, 7.0, 8.0, 9.0, 6.0, 9.0];

pub fn example_graph() -> ConflictGraph {
    ConflictGraph::from_edges(6, &EXAMPLE_EDGES).unwrap()
}

pub fn example_bids() -> BidVector {
    BidVector::new(EXAMPLE_BIDS.to_vec()).unwrap()
}

pub fn example_values() -> ValueVector {
    ValueVector::new(EXAMPLE_BIDS.to_vec()).unwrap()
}

pub fn example_partition(g: &ConflictGraph) -> GroupPartition {
    GroupPartition::new(g, vec![vec![1, 5], vec![2, 4], vec![3, 6]]).unwrap()
}

/// Random simple graph with a hard degree cap: pairs are visited in random
/// order and kept with probability `p` while both endpoints have room.
pub fn random_capped_graph(n: usize, max_degree: usize, seed: u64) -> ConflictGraph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p: f64 = rng.gen_range(0.15..0.75);
    let mut pairs: Vec<(usize, usize)> = (1..=n)
        .flat_map(|i| ((i + 1)..=n).map(move |j| (i, j)))
        .collect();
    // Fisher-Yates so the degree budget is not biased toward low ids.
    for idx in (1..pairs.len()).rev() {
        let other = rng.gen_range(0..=idx);
        pairs.swap(idx, other);
    }
    let mut degrees = vec![0usize; n];
    let mut edges = Vec::new();
    for (i, j) in pairs {
        if degrees[i - 1] < max_degree && degrees[j - 1] < max_degree && rng.gen_bool(p) {
            degrees[i - 1] += 1;
            degrees[j - 1] += 1;
            edges.push((i, j));
        }
    }
    ConflictGraph::from_edges(n, &edges).unwrap()
}

pub fn uniform_bids(n: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(lo..=hi)).collect()
}

/// Exhaustive maximum-weight independent set over all 2^n subsets, summing
/// weights in id order and breaking ties toward the lexicographically
/// smallest set.
pub fn exhaustive_mwis(g: &ConflictGraph, w: &[f64]) -> (Vec<usize>, f64) {
    let n = g.n();
    assert!(n <= 22, "exhaustive oracle is for small n");
    let edges = g.edges();
    let mut best_set: Vec<usize> = Vec::new();
    let mut best_weight = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        let members: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let independent = edges
            .iter()
            .all(|&(i, j)| !(members.contains(&i) && members.contains(&j)));
        if !independent {
            continue;
        }
        let weight: f64 = members.iter().map(|&i| w[i - 1]).sum();
        if weight > best_weight || (weight == best_weight && lex_smaller(&members, &best_set)) {
            best_weight = weight;
            best_set = members;
        }
    }
    (best_set, best_weight)
}

/// Sorted-id-list lexicographic order with the prefix rule.
fn lex_smaller(a: &[usize], b: &[usize]) -> bool {
    for (x, y) in a.iter().zip(b.iter()) {
        if x != y {
            return x < y;
        }
    }
    a.len() < b.len()
}

/// Permutations via Heap's algorithm — intentionally a different
/// enumeration scheme (and order) from the library's.
fn heap_permutations(items: &[usize]) -> Vec<Vec<usize>> {
    let mut a = items.to_vec();
    let mut out = vec![a.clone()];
    let mut c = vec![0usize; a.len()];
    let mut i = 0;
    while i < a.len() {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Set-based reimplementation of the per-ordering allocation.
fn oracle_allocation(g: &ConflictGraph, groups: &[Vec<usize>], ordering: &[usize]) -> Vec<usize> {
    let mut allocated: BTreeSet<usize> = BTreeSet::new();
    for &u in ordering {
        for &i in &groups[u - 1] {
            let blocked = g.constraint_set(i).iter().any(|j| allocated.contains(j));
            if !blocked {
                allocated.insert(i);
            }
        }
    }
    allocated.into_iter().collect()
}

/// Best perceived utility over every ordering of the nonempty groups.
pub fn oracle_best_utility(g: &ConflictGraph, groups: &[Vec<usize>], bids: &[f64]) -> f64 {
    let nonempty: Vec<usize> = groups
        .iter()
        .enumerate()
        .filter_map(|(idx, g)| (!g.is_empty()).then_some(idx + 1))
        .collect();
    heap_permutations(&nonempty)
        .iter()
        .map(|ordering| {
            oracle_allocation(g, groups, ordering)
                .iter()
                .map(|&i| bids[i - 1])
                .sum::<f64>()
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Recomputes the GOSPAL price of `target` by full enumeration with the
/// target's bid literally zeroed.
pub fn gospal_price_oracle(
    g: &ConflictGraph,
    groups: &[Vec<usize>],
    bids: &[f64],
    target: usize,
) -> f64 {
    let best = oracle_best_utility(g, groups, bids);
    let mut zeroed = bids.to_vec();
    zeroed[target - 1] = 0.0;
    let rivals_best = oracle_best_utility(g, groups, &zeroed);
    rivals_best - (best - bids[target - 1])
}

/// Recomputes the VCG price of `target` by exhaustive subset search with the
/// target removed from the instance.
pub fn vcg_price_oracle(g: &ConflictGraph, bids: &[f64], target: usize) -> f64 {
    let (_, optimum) = exhaustive_mwis(g, bids);
    let mut without = bids.to_vec();
    without[target - 1] = 0.0;
    // Removing the user: forbid it by pruning subsets that contain it.
    let n = g.n();
    let edges = g.edges();
    let mut best = f64::NEG_INFINITY;
    for mask in 0u32..(1 << n) {
        if mask & (1 << (target - 1)) != 0 {
            continue;
        }
        let members: Vec<usize> = (1..=n).filter(|i| mask & (1 << (i - 1)) != 0).collect();
        let independent = edges
            .iter()
            .all(|&(i, j)| !(members.contains(&i) && members.contains(&j)));
        if independent {
            let weight: f64 = members.iter().map(|&i| bids[i - 1]).sum();
            best = best.max(weight);
        }
    }
    best - (optimum - bids[target - 1])
}

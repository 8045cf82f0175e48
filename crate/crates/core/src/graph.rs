//! Conflict-graph representation, validation, random generation and JSON I/O.
//!
//! Users are identified by 1-based ids `1..=n`. The constraint set `S_i` of
//! user `i` is the set of users that cannot hold the resource at the same
//! time as `i`; constraints are symmetric, so the structure is a simple
//! undirected graph.

use std::collections::BTreeSet;
use std::fs;
use std::io;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of stub re-shuffles tried before resampling the degree sequence.
pub const SHUFFLE_BUDGET: usize = 100;
/// Number of degree-sequence resamples tried before giving up.
pub const RESAMPLE_BUDGET: usize = 100;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("user {j} is in the constraint set of {i} but not vice versa")]
    AsymmetricEdge { i: usize, j: usize },
    #[error("user {i} lists itself in its own constraint set")]
    SelfConflict { i: usize },
    #[error("user id {id} is out of range 1..={n}")]
    OutOfRangeId { id: usize, n: usize },
    #[error("graph must have at least one user")]
    Empty,
    #[error("invalid degree distribution: {0}")]
    InvalidDistribution(String),
    #[error("failed to realize a simple graph after {resamples} degree resamples")]
    GenerationFailed { resamples: usize },
    #[error("failed to parse graph file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Simple undirected conflict graph over users `1..=n`.
///
/// Immutable once constructed; all constructors enforce symmetry, absence of
/// self-conflicts and id range.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConflictGraph {
    n: usize,
    /// `adj[i - 1]` is the constraint set of user `i`, holding 1-based ids.
    adj: Vec<BTreeSet<usize>>,
}

impl ConflictGraph {
    /// Builds a graph from an undirected edge list over users `1..=n`.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut adj = vec![BTreeSet::new(); n];
        for &(i, j) in edges {
            for id in [i, j] {
                if id < 1 || id > n {
                    return Err(GraphError::OutOfRangeId { id, n });
                }
            }
            if i == j {
                return Err(GraphError::SelfConflict { i });
            }
            adj[i - 1].insert(j);
            adj[j - 1].insert(i);
        }
        Ok(Self { n, adj })
    }

    /// Builds a graph directly from per-user constraint sets, validating all
    /// invariants (symmetry, no self-conflict, ids in range).
    pub fn from_constraint_sets(sets: Vec<BTreeSet<usize>>) -> Result<Self, GraphError> {
        let g = Self {
            n: sets.len(),
            adj: sets,
        };
        g.validate()?;
        Ok(g)
    }

    /// Graph with no conflicts.
    pub fn edgeless(n: usize) -> Self {
        Self {
            n,
            adj: vec![BTreeSet::new(); n],
        }
    }

    /// Graph in which every pair of users conflicts.
    pub fn complete(n: usize) -> Self {
        let adj = (1..=n)
            .map(|i| (1..=n).filter(|&j| j != i).collect())
            .collect();
        Self { n, adj }
    }

    /// Re-checks all invariants, reporting the first violation found.
    pub fn validate(&self) -> Result<(), GraphError> {
        if self.n == 0 {
            return Err(GraphError::Empty);
        }
        for (idx, set) in self.adj.iter().enumerate() {
            let i = idx + 1;
            for &j in set {
                if j < 1 || j > self.n {
                    return Err(GraphError::OutOfRangeId { id: j, n: self.n });
                }
                if j == i {
                    return Err(GraphError::SelfConflict { i });
                }
                if !self.adj[j - 1].contains(&i) {
                    return Err(GraphError::AsymmetricEdge { i, j });
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Constraint set `S_i` of user `i` (1-based).
    pub fn constraint_set(&self, i: usize) -> &BTreeSet<usize> {
        &self.adj[i - 1]
    }

    pub fn conflicts(&self, i: usize, j: usize) -> bool {
        self.adj[i - 1].contains(&j)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i - 1].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).max().unwrap_or(0)
    }

    /// Group bound `eta = max_i |S_i| + 1`.
    pub fn eta(&self) -> usize {
        self.max_degree() + 1
    }

    pub fn users(&self) -> impl Iterator<Item = usize> {
        1..=self.n
    }

    /// Edges as `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=self.n {
            for &j in &self.adj[i - 1] {
                if i < j {
                    out.push((i, j));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BTreeSet::len).sum::<usize>() / 2
    }
}

/// Probability mass function over node degrees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DegreeDistribution {
    support: Vec<usize>,
    pmf: Vec<f64>,
}

const PMF_SUM_TOLERANCE: f64 = 1e-9;

impl DegreeDistribution {
    pub fn new(support: Vec<usize>, pmf: Vec<f64>) -> Result<Self, GraphError> {
        if support.is_empty() {
            return Err(GraphError::InvalidDistribution(
                "empty support".to_string(),
            ));
        }
        if support.len() != pmf.len() {
            return Err(GraphError::InvalidDistribution(format!(
                "support has {} values but pmf has {}",
                support.len(),
                pmf.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for &d in &support {
            if !seen.insert(d) {
                return Err(GraphError::InvalidDistribution(format!(
                    "duplicate degree {d} in support"
                )));
            }
        }
        if pmf.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(GraphError::InvalidDistribution(
                "pmf entries must be finite and nonnegative".to_string(),
            ));
        }
        let sum: f64 = pmf.iter().sum();
        if (sum - 1.0).abs() > PMF_SUM_TOLERANCE {
            return Err(GraphError::InvalidDistribution(format!(
                "pmf sums to {sum}, expected 1"
            )));
        }
        Ok(Self { support, pmf })
    }

    /// Uniform distribution over the given degrees.
    pub fn uniform(support: Vec<usize>) -> Result<Self, GraphError> {
        let p = 1.0 / support.len() as f64;
        let pmf = vec![p; support.len()];
        Self::new(support, pmf)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn pmf(&self) -> &[f64] {
        &self.pmf
    }

    pub fn max_degree(&self) -> usize {
        *self.support.iter().max().expect("non-empty support")
    }

    pub fn mean(&self) -> f64 {
        self.support
            .iter()
            .zip(&self.pmf)
            .map(|(&d, &p)| d as f64 * p)
            .sum()
    }

    fn sample(&self, rng: &mut impl Rng) -> usize {
        let u: f64 = rng.gen();
        let mut acc = 0.0;
        for (&d, &p) in self.support.iter().zip(&self.pmf) {
            acc += p;
            if u < acc {
                return d;
            }
        }
        *self.support.last().expect("non-empty support")
    }
}

/// Draws one degree per node iid from `dist`.
fn sample_degree_sequence(n: usize, dist: &DegreeDistribution, rng: &mut impl Rng) -> Vec<usize> {
    (0..n).map(|_| dist.sample(rng)).collect()
}

/// Makes the stub count even by incrementing one uniformly chosen node whose
/// degree is still below both `max_degree` and `n - 1`. Returns false when no
/// such node exists (caller resamples).
fn repair_parity(
    degrees: &mut [usize],
    max_degree: usize,
    n: usize,
    rng: &mut impl Rng,
) -> bool {
    if degrees.iter().sum::<usize>() % 2 == 0 {
        return true;
    }
    let candidates: Vec<usize> = (0..degrees.len())
        .filter(|&v| degrees[v] < max_degree && degrees[v] < n - 1)
        .collect();
    match candidates.as_slice() {
        [] => false,
        cs => {
            let &v = cs.choose(rng).expect("non-empty candidates");
            degrees[v] += 1;
            true
        }
    }
}

/// Attempts one stub-matching pass; `None` when the pairing produces a
/// self-loop or multi-edge.
fn try_stub_matching(degrees: &[usize], rng: &mut impl Rng) -> Option<Vec<(usize, usize)>> {
    let mut stubs: Vec<usize> = Vec::with_capacity(degrees.iter().sum());
    for (v, &d) in degrees.iter().enumerate() {
        stubs.extend(std::iter::repeat_n(v + 1, d));
    }
    stubs.shuffle(rng);
    let mut seen = BTreeSet::new();
    let mut edges = Vec::with_capacity(stubs.len() / 2);
    for pair in stubs.chunks_exact(2) {
        let (u, v) = (pair[0].min(pair[1]), pair[0].max(pair[1]));
        if u == v || !seen.insert((u, v)) {
            return None;
        }
        edges.push((u, v));
    }
    Some(edges)
}

/// Generates a simple random graph with the desired degree distribution via
/// the configuration model: sample a degree sequence iid from `dist`, repair
/// parity, then pair stubs uniformly, rejecting self-loops and multi-edges.
///
/// Deterministic for a fixed seed. Fails after [`RESAMPLE_BUDGET`] degree
/// resamples, each allowed [`SHUFFLE_BUDGET`] stub re-shuffles.
pub fn generate_configuration_model(
    n: usize,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<ConflictGraph, GraphError> {
    if n < 2 {
        return Err(GraphError::InvalidDistribution(
            "configuration model requires n >= 2".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_degree = dist.max_degree();
    for _ in 0..RESAMPLE_BUDGET {
        let mut degrees = sample_degree_sequence(n, dist, &mut rng);
        if degrees.iter().any(|&d| d > n - 1) {
            continue; // not realizable as a simple graph
        }
        if !repair_parity(&mut degrees, max_degree, n, &mut rng) {
            continue;
        }
        for _ in 0..SHUFFLE_BUDGET {
            if let Some(edges) = try_stub_matching(&degrees, &mut rng) {
                return ConflictGraph::from_edges(n, &edges);
            }
        }
    }
    Err(GraphError::GenerationFailed {
        resamples: RESAMPLE_BUDGET,
    })
}

/// On-disk form: `{"n": int, "edges": [[i, j], ...]}` with `i < j`, 1-based.
#[derive(Serialize, Deserialize)]
struct GraphFile {
    n: usize,
    edges: Vec<(usize, usize)>,
}

pub fn store_graph(g: &ConflictGraph, path: impl AsRef<Path>) -> Result<(), GraphError> {
    let file = GraphFile {
        n: g.n(),
        edges: g.edges(),
    };
    let json = serde_json::to_string_pretty(&file)?;
    fs::write(path, json + "\n")?;
    Ok(())
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<ConflictGraph, GraphError> {
    let text = fs::read_to_string(path)?;
    let file: GraphFile = serde_json::from_str(&text)?;
    let g = ConflictGraph::from_edges(file.n, &file.edges)?;
    g.validate()?;
    Ok(g)
}

//! Randomized construction of small hypergraphs with connected restrictions.
//!
//! Start from a greedy cover `H` of all `k`-sets by `(k+1)`-sets, take the
//! union `H*` of `s` uniformly random relabelings of it, then repair every
//! bad `(k−1)`-set `A` (one whose `G(H*, A)` is disconnected) by adding
//! hyperedges `A ∪ {u, v}` that join its components. The result `H**` has
//! connected restrictions, so `θ(H**)` is ucp-equivalent to `Ψ_{n,k}`.
//!
//! Permutation `i` draws from a ChaCha20 generator seeded with the run seed
//! and switched to stream `i`, so each permutation is reproducible on its own.

use num_rational::Ratio;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::covering::{greedy_cover, CoverError};
use crate::subsets::{self, binomial, full, members};
use crate::symmetric::{check_restrictions, g_undirected, FailureMode, Hypergraph, SymmetricError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuilderError {
    #[error("not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("permutation acts on {got} points but the hypergraph has {expected}")]
    SizeMismatch { expected: usize, got: usize },
    #[error("component sizes must all be at least 2")]
    SmallComponent,
    #[error("need 2 <= d <= {max}, got d={d}")]
    BadSubsetSize { d: usize, max: usize },
    #[error("vertex {0} is isolated")]
    IsolatedVertex(usize),
    #[error("builder needs n > k+1 >= 3 and s >= 1, got n={n} k={k} s={s}")]
    BadParameters { n: usize, k: usize, s: usize },
    #[error(transparent)]
    Cover(#[from] CoverError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
}

/// A bijection of `0..n`, stored as the image of each point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Permutation, BuilderError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &v in &images {
            if v >= n || std::mem::replace(&mut seen[v], true) {
                return Err(BuilderError::NotAPermutation(n));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(n: usize) -> Permutation {
        Permutation((0..n).collect())
    }

    /// Uniform permutation by Fisher–Yates.
    pub fn random<R: rand::Rng>(n: usize, rng: &mut R) -> Permutation {
        let mut images: Vec<usize> = (0..n).collect();
        images.shuffle(rng);
        Permutation(images)
    }

    /// Permutation number `index` of a seeded run.
    pub fn seeded(n: usize, seed: u64, index: u64) -> Permutation {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        rng.set_stream(index);
        Permutation::random(n, &mut rng)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn apply(&self, v: usize) -> usize {
        self.0[v]
    }

    pub fn apply_set(&self, set: u64) -> u64 {
        members(set).fold(0, |acc, v| acc | (1 << self.0[v]))
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&v| self.0[v]).collect())
    }
}

/// `π(H) = {π(e) : e ∈ H}`.
pub fn permute_hypergraph(h: &Hypergraph, pi: &Permutation) -> Result<Hypergraph, BuilderError> {
    if pi.len() != h.n() {
        return Err(BuilderError::SizeMismatch {
            expected: h.n(),
            got: pi.len(),
        });
    }
    Ok(Hypergraph::from_edges(
        h.n(),
        h.k(),
        h.edges().map(|e| pi.apply_set(e)),
    )?)
}

/// `H* = π₁(H) ∪ … ∪ π_s(H)` with the permutations that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermutedUnion {
    pub source: Hypergraph,
    pub permutations: Vec<Permutation>,
    pub union: Hypergraph,
}

pub fn permuted_union(source: &Hypergraph, s: usize, seed: u64) -> PermutedUnion {
    let n = source.n();
    let permutations: Vec<Permutation> = (0..s as u64)
        .map(|i| Permutation::seeded(n, seed, i))
        .collect();
    let mut union = Hypergraph::new(n, source.k()).expect("source is valid");
    for pi in &permutations {
        for e in source.edges() {
            union
                .insert(pi.apply_set(e))
                .expect("relabeling keeps edge size");
        }
    }
    PermutedUnion {
        source: source.clone(),
        permutations,
        union,
    }
}

fn check_union_args(sizes: &[usize], d: usize) -> Result<usize, BuilderError> {
    if sizes.iter().any(|&a| a < 2) {
        return Err(BuilderError::SmallComponent);
    }
    let m: usize = sizes.iter().sum();
    if d < 2 || d > m / 2 {
        return Err(BuilderError::BadSubsetSize { d, max: m / 2 });
    }
    Ok(m)
}

/// Number of index sets `I` with `Σ_{i∈I} a_i = d`, by subset-sum counting.
pub fn count_component_unions(sizes: &[usize], d: usize) -> Result<u64, BuilderError> {
    check_union_args(sizes, d)?;
    let mut ways = vec![0u64; d + 1];
    ways[0] = 1;
    for &a in sizes {
        for total in (a..=d).rev() {
            ways[total] += ways[total - a];
        }
    }
    Ok(ways[d])
}

/// `C(⌊m/2⌋, ⌊d/2⌋)`, the bound on [`count_component_unions`].
pub fn union_count_bound(m: usize, d: usize) -> u64 {
    binomial((m / 2) as u64, (d / 2) as u64)
}

/// A simple undirected graph on `0..m` as adjacency masks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn from_edges(m: usize, edges: &[(usize, usize)]) -> SimpleGraph {
        assert!(m <= subsets::MAX_GROUND);
        let mut adj = vec![0u64; m];
        for &(a, b) in edges {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
        SimpleGraph { adj }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn components(&self) -> Vec<u64> {
        let mut left = full(self.order());
        let mut out = Vec::new();
        while left != 0 {
            let mut comp = 1u64 << left.trailing_zeros();
            let mut frontier = comp;
            while frontier != 0 {
                let next = members(frontier).fold(0, |acc, v| acc | self.adj[v]) & !comp;
                comp |= next;
                frontier = next;
            }
            out.push(comp);
            left &= !comp;
        }
        out
    }

    /// `true` iff no edge joins `set` to its complement.
    pub fn is_closed(&self, set: u64) -> bool {
        members(set).all(|v| self.adj[v] & !set == 0)
    }
}

/// Probability that a uniformly random `d`-subset `Z` of the vertices has no
/// edge leaving it.
#[derive(Debug, Clone, PartialEq)]
pub struct DisconnectEstimate {
    pub samples: u64,
    pub hits: u64,
    pub monte_carlo: f64,
    /// by enumeration of every `d`-subset, for at most [`EXACT_MAX_M`] vertices
    pub exact: Option<Ratio<u64>>,
    /// `C(⌊m/2⌋, ⌊d/2⌋) / C(m, d)`
    pub bound: Ratio<u64>,
}

impl DisconnectEstimate {
    /// Binomial standard deviation of the Monte-Carlo frequency around `p`.
    pub fn sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.samples as f64).sqrt()
    }
}

pub const EXACT_MAX_M: usize = 10;

pub fn estimate_disconnect_probability(
    graph: &SimpleGraph,
    d: usize,
    samples: u64,
    seed: u64,
) -> Result<DisconnectEstimate, BuilderError> {
    let m = graph.order();
    if let Some(v) = (0..m).find(|&v| graph.adj[v] == 0) {
        return Err(BuilderError::IsolatedVertex(v));
    }
    if d < 2 || d > m / 2 {
        return Err(BuilderError::BadSubsetSize { d, max: m / 2 });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..m).collect();
    let mut hits = 0u64;
    for _ in 0..samples {
        order.shuffle(&mut rng);
        let z = subsets::from_members(order[..d].iter().copied());
        if graph.is_closed(z) {
            hits += 1;
        }
    }
    let total = binomial(m as u64, d as u64);
    let exact = (m <= EXACT_MAX_M).then(|| {
        let closed = subsets::k_subsets(m, d)
            .filter(|&z| graph.is_closed(z))
            .count();
        Ratio::new(closed as u64, total)
    });
    Ok(DisconnectEstimate {
        samples,
        hits,
        monte_carlo: if samples == 0 {
            0.0
        } else {
            hits as f64 / samples as f64
        },
        exact,
        bound: Ratio::new(union_count_bound(m, d), total),
    })
}

/// Hyperedges `A ∪ {r_i, r_{i+1}}` chaining the least vertices `r_1 < r_2 < …`
/// of the components of `G(H, A)`. Empty when the graph is connected.
pub fn repair_bad_set(h: &Hypergraph, base: u64) -> Result<Vec<u64>, BuilderError> {
    let g = g_undirected(h, base)?;
    let reps: Vec<u64> = g
        .components()
        .into_iter()
        .map(|c| c & c.wrapping_neg())
        .collect();
    Ok(reps.windows(2).map(|w| base | w[0] | w[1]).collect())
}

/// Repairs made for one bad set. `added` is empty when earlier repairs in
/// the same pass already connected its graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Repair {
    pub base: u64,
    /// components of `G(H, A)` just before this repair
    pub components: usize,
    pub added: Vec<u64>,
}

/// Everything needed to reproduce and audit a build.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairReport {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub seed: u64,
    pub cover_size: usize,
    pub union_size: usize,
    /// every bad set met, in the order repaired
    pub repairs: Vec<Repair>,
    /// passes of bad-set detection, the last one finding none
    pub rounds: usize,
    pub final_size: usize,
}

impl RepairReport {
    /// Number of bad sets `t`.
    pub fn t(&self) -> usize {
        self.repairs.len()
    }

    pub fn bad_sets(&self) -> Vec<u64> {
        self.repairs.iter().map(|r| r.base).collect()
    }

    pub fn added(&self) -> Vec<u64> {
        self.repairs
            .iter()
            .flat_map(|r| r.added.iter().copied())
            .collect()
    }

    pub fn to_json(&self) -> ReportJson {
        let one_based = |sets: Vec<u64>| sets.into_iter().map(subsets::to_one_based).collect();
        ReportJson {
            n: self.n,
            k: self.k,
            s: self.s,
            seed: self.seed,
            cover_size: self.cover_size,
            union_size: self.union_size,
            bad_sets: one_based(self.bad_sets()),
            added: one_based(self.added()),
            final_size: self.final_size,
        }
    }
}

/// JSON form of a [`RepairReport`], with 1-based vertex lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ReportJson {
    pub n: usize,
    pub k: usize,
    pub s: usize,
    pub seed: u64,
    pub cover_size: usize,
    pub union_size: usize,
    pub bad_sets: Vec<Vec<usize>>,
    pub added: Vec<Vec<usize>>,
    pub final_size: usize,
}

/// Default number of permuted copies.
pub const DEFAULT_S: usize = 5;

/// Builds `H**` from `s` permuted copies of the greedy cover plus repairs.
pub fn build_connected_restrictions(
    n: usize,
    k: usize,
    s: usize,
    seed: u64,
) -> Result<(Hypergraph, RepairReport), BuilderError> {
    if !(k >= 2 && n > k + 1 && s >= 1) {
        return Err(BuilderError::BadParameters { n, k, s });
    }
    let cover = greedy_cover(n, k)?;
    let source = Hypergraph::from_edges(n, k, cover.blocks.iter().copied())?;
    let PermutedUnion { union, .. } = permuted_union(&source, s, seed);
    let union_size = union.len();
    let mut h = union;
    let mut repairs = Vec::new();
    let mut rounds = 0;
    loop {
        rounds += 1;
        let bad = check_restrictions(&h, FailureMode::AllFailures).failures;
        if bad.is_empty() {
            break;
        }
        for base in bad {
            let components = g_undirected(&h, base)?.components().len();
            let added = repair_bad_set(&h, base)?;
            for &e in &added {
                h.insert(e)?;
            }
            repairs.push(Repair {
                base,
                components,
                added,
            });
        }
    }
    let report = RepairReport {
        n,
        k,
        s,
        seed,
        cover_size: cover.len(),
        union_size,
        repairs,
        rounds,
        final_size: h.len(),
    };
    Ok((h, report))
}

/// Largest possible number of components of `G(H, A)` when `H` covers every
/// `k`-set: each component then has at least two of the `n−k+1` vertices.
pub fn max_components(n: usize, k: usize) -> usize {
    (n - k).div_ceil(2)
}

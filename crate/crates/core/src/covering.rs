//! Covering designs `C(n, r, k)` with their Turán duals.
//!
//! A cover is a system of `r`-subsets (blocks) of an `n`-set such that every
//! `k`-subset lies in some block. Blocks are bitmask sets (see [`crate::subsets`]).

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::subsets::{self, binomial, colex_rank, k_subsets, k_subsets_of};

type CoverCache = HashMap<(usize, usize, usize), CoverDesign>;

/// Largest ground set the exact branch-and-bound oracle accepts.
pub const EXACT_MAX_N: usize = 9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CoverError {
    #[error("invalid covering parameters n={n}, r={r}, k={k}: need n > r > k > 0")]
    BadParameters { n: usize, r: usize, k: usize },
    #[error("greedy cover needs n > k >= 2, got n={n}, k={k}")]
    GreedyRange { n: usize, k: usize },
    #[error("instance C({n},{r},{k}) too large for the exact oracle (n <= {max})", max = EXACT_MAX_N)]
    TooLarge { n: usize, r: usize, k: usize },
    #[error("cover size must be at least 1")]
    EmptyCover,
    #[error("line {line}: bad block '{text}'")]
    BadBlock { line: usize, text: String },
}

/// A system of `r`-subsets of `{0..n}` intended to cover every `k`-subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverDesign {
    pub n: usize,
    pub r: usize,
    pub k: usize,
    pub blocks: Vec<u64>,
}

impl CoverDesign {
    /// The trivial cover consisting of every `r`-subset.
    pub fn complete(n: usize, r: usize, k: usize) -> Self {
        CoverDesign {
            n,
            r,
            k,
            blocks: k_subsets(n, r).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Exhaustive check over all `k`-subsets; also checks block sizes and range.
    pub fn verify(&self) -> bool {
        verify_cover(self)
    }
}

/// `true` iff every block is an `r`-subset of the ground set and every
/// `k`-subset is contained in at least one block.
pub fn verify_cover(design: &CoverDesign) -> bool {
    let ground = subsets::full(design.n);
    if design
        .blocks
        .iter()
        .any(|&b| b & !ground != 0 || subsets::size(b) != design.r)
    {
        return false;
    }
    let mut covered = vec![false; binomial(design.n as u64, design.k as u64) as usize];
    for &b in &design.blocks {
        for t in k_subsets_of(b, design.k) {
            covered[colex_rank(t)] = true;
        }
    }
    covered.into_iter().all(|c| c)
}

/// Upper bound on `C(n, k+1, k)` from the classical greedy argument:
/// `ceil(binom(n, k) (1 + ln(k+1)) / (k+1))`.
pub fn greedy_bound(n: usize, k: usize) -> u64 {
    let b = binomial(n as u64, k as u64) as f64;
    let kp1 = (k + 1) as f64;
    (b * (1.0 + kp1.ln()) / kp1).ceil() as u64
}

/// Greedy cover of all `k`-subsets by `(k+1)`-subsets.
///
/// Each round takes the block covering the most still-uncovered `k`-subsets,
/// breaking ties by the colex-least block.
pub fn greedy_cover(n: usize, k: usize) -> Result<CoverDesign, CoverError> {
    if !(k >= 2 && n > k) || n > subsets::MAX_GROUND {
        return Err(CoverError::GreedyRange { n, k });
    }
    let r = k + 1;
    let blocks: Vec<u64> = k_subsets(n, r).collect();
    let kcount = binomial(n as u64, k as u64) as usize;
    // gain[b] = number of uncovered k-subsets inside block b
    let mut gain: Vec<usize> = vec![r; blocks.len()];
    let mut covered = vec![false; kcount];
    let mut remaining = kcount;
    let mut chosen = Vec::new();
    let outside = |t: u64| subsets::members(subsets::full(n) & !t);

    while remaining > 0 {
        // deterministic reduction: max gain, then least colex index
        let best = gain
            .par_iter()
            .enumerate()
            .map(|(i, &g)| (g, std::cmp::Reverse(i)))
            .max()
            .map(|(_, std::cmp::Reverse(i))| i)
            .expect("at least one block");
        let block = blocks[best];
        chosen.push(block);
        for t in k_subsets_of(block, k) {
            let idx = colex_rank(t);
            if covered[idx] {
                continue;
            }
            covered[idx] = true;
            remaining -= 1;
            for y in outside(t) {
                gain[colex_rank(t | (1u64 << y))] -= 1;
            }
        }
    }
    chosen.sort_by_key(|&b| colex_rank(b));
    Ok(CoverDesign {
        n,
        r,
        k,
        blocks: chosen,
    })
}

/// A Turán system: `t`-subsets of an `n`-set such that every `ℓ`-subset contains one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TuranSystem {
    pub n: usize,
    pub l: usize,
    pub t: usize,
    pub sets: Vec<u64>,
}

impl TuranSystem {
    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `true` iff every `ℓ`-subset contains at least one member.
    pub fn verify(&self) -> bool {
        let ground = subsets::full(self.n);
        if self
            .sets
            .iter()
            .any(|&s| s & !ground != 0 || subsets::size(s) != self.t)
        {
            return false;
        }
        k_subsets(self.n, self.l).all(|big| self.sets.iter().any(|&s| s & !big == 0))
    }
}

/// Complements every block, turning a `C(n, r, k)` cover into a `T(n, n-k, n-r)` system.
pub fn turan_from_cover(design: &CoverDesign) -> TuranSystem {
    let ground = subsets::full(design.n);
    let mut sets: Vec<u64> = design.blocks.iter().map(|&b| ground & !b).collect();
    sets.sort_by_key(|&s| colex_rank(s));
    TuranSystem {
        n: design.n,
        l: design.n - design.k,
        t: design.n - design.r,
        sets,
    }
}

/// Inverse of [`turan_from_cover`].
pub fn cover_from_turan(system: &TuranSystem) -> CoverDesign {
    let ground = subsets::full(system.n);
    let mut blocks: Vec<u64> = system.sets.iter().map(|&s| ground & !s).collect();
    blocks.sort_by_key(|&b| colex_rank(b));
    CoverDesign {
        n: system.n,
        r: system.n - system.t,
        k: system.n - system.l,
        blocks,
    }
}

/// Schönheim lower bound `ceil(n/r ceil((n-1)/(r-1) ... ceil((n-k+1)/(r-k+1))))`.
pub fn schonheim_bound(n: usize, r: usize, k: usize) -> u64 {
    let mut acc: u64 = 1;
    for i in (0..k).rev() {
        let num = (n - i) as u64 * acc;
        let den = (r - i) as u64;
        acc = num.div_ceil(den);
    }
    acc
}

/// The exact covering number `C(n, r, k)` together with an optimal cover.
///
/// Results are cached for the lifetime of the process.
pub fn exact_cover(n: usize, r: usize, k: usize) -> Result<CoverDesign, CoverError> {
    if !(n > r && r > k && k > 0) {
        return Err(CoverError::BadParameters { n, r, k });
    }
    if n > EXACT_MAX_N {
        return Err(CoverError::TooLarge { n, r, k });
    }
    static CACHE: OnceLock<Mutex<CoverCache>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(d) = cache.lock().expect("cover cache").get(&(n, r, k)) {
        return Ok(d.clone());
    }
    let mut memo = HashMap::new();
    let design = exact_cover_memo(n, r, k, &mut memo);
    cache
        .lock()
        .expect("cover cache")
        .insert((n, r, k), design.clone());
    Ok(design)
}

fn exact_cover_memo(
    n: usize,
    r: usize,
    k: usize,
    memo: &mut HashMap<(usize, usize, usize), usize>,
) -> CoverDesign {
    // every point lies in at least C(n-1, r-1, k-1) blocks
    let link = if k == 1 || r == n {
        1
    } else {
        match memo.get(&(n - 1, r - 1, k - 1)) {
            Some(&c) => c,
            None => exact_cover_memo(n - 1, r - 1, k - 1, memo).len(),
        }
    };
    let search = ExactSearch::new(n, r, k, link);
    let mut target = (n * link)
        .div_ceil(r)
        .max(schonheim_bound(n, r, k) as usize);
    loop {
        if let Some(blocks) = search.solve(target) {
            let mut blocks: Vec<u64> = blocks.into_iter().map(|b| search.blocks[b]).collect();
            blocks.sort_by_key(|&b| colex_rank(b));
            memo.insert((n, r, k), blocks.len());
            return CoverDesign { n, r, k, blocks };
        }
        target += 1;
    }
}

/// The exact covering number `C(n, r, k)`, for `n <= 9`.
pub fn exact_cover_number(n: usize, r: usize, k: usize) -> Result<u64, CoverError> {
    exact_cover(n, r, k).map(|d| d.len() as u64)
}

/// Iterative-deepening branch and bound over block systems.
///
/// Branches on the uncovered `k`-set with the fewest admissible blocks. Blocks
/// tried earlier at a node are forbidden in later sibling subtrees. Candidate
/// blocks are grouped into orbits of the group permuting points within each
/// atom of the partition generated by the chosen blocks and the branching sets
/// on the current path; only one representative per orbit is tried. Forbidden
/// blocks always form whole orbits, so they never need to refine the partition.
struct ExactSearch {
    r: usize,
    blocks: Vec<u64>,
    /// per block: bitmask over k-set indices it contains
    block_cover: Vec<u128>,
    /// per k-set: bitmask over block indices containing it
    kset_blocks: Vec<u128>,
    ksets: Vec<u64>,
    /// per point: bitmask over k-set indices containing it
    point_ksets: Vec<u128>,
    /// k-subsets of a block that contain a fixed point
    per_point_in_block: usize,
    /// per ordered point pair: bitmask over k-set indices containing both
    pair_ksets: Vec<u128>,
    /// k-subsets of a block that contain two fixed points
    per_pair_in_block: usize,
    /// lower bound on the degree of every point
    link_cover: usize,
    n: usize,
}

struct Node {
    chosen: Vec<usize>,
    forbidden: u128,
    uncovered: u128,
    degree: [usize; EXACT_MAX_N],
    /// cap on the degree of point 0, the designated minimum-degree point
    max_deg0: usize,
}

fn refine(atoms: &[u64], set: u64) -> Vec<u64> {
    let mut next = Vec::with_capacity(atoms.len() + 4);
    for &a in atoms {
        let inside = a & set;
        let outside = a & !set;
        if inside != 0 {
            next.push(inside);
        }
        if outside != 0 {
            next.push(outside);
        }
    }
    next
}

impl ExactSearch {
    fn new(n: usize, r: usize, k: usize, link_cover: usize) -> Self {
        let blocks: Vec<u64> = k_subsets(n, r).collect();
        let ksets: Vec<u64> = k_subsets(n, k).collect();
        debug_assert!(blocks.len() <= 128 && ksets.len() <= 128);
        let block_cover = blocks
            .iter()
            .map(|&b| k_subsets_of(b, k).fold(0u128, |acc, t| acc | (1u128 << colex_rank(t))))
            .collect();
        let kset_blocks = ksets
            .iter()
            .map(|&t| {
                blocks
                    .iter()
                    .enumerate()
                    .filter(|&(_, &b)| b & t == t)
                    .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
            })
            .collect();
        let point_ksets = (0..n)
            .map(|x| {
                ksets
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| t >> x & 1 == 1)
                    .fold(0u128, |acc, (i, _)| acc | (1u128 << i))
            })
            .collect();
        let pair_ksets = (0..n * n)
            .map(|i| {
                let pair = (1u64 << (i / n)) | (1u64 << (i % n));
                ksets
                    .iter()
                    .enumerate()
                    .filter(|&(_, &t)| i / n != i % n && t & pair == pair)
                    .fold(0u128, |acc, (j, _)| acc | (1u128 << j))
            })
            .collect();
        ExactSearch {
            r,
            blocks,
            block_cover,
            kset_blocks,
            ksets,
            point_ksets,
            per_point_in_block: binomial(r as u64 - 1, k as u64 - 1) as usize,
            pair_ksets,
            per_pair_in_block: if k >= 2 {
                binomial(r as u64 - 2, k as u64 - 2) as usize
            } else {
                0
            },
            link_cover,
            n,
        }
    }

    fn solve(&self, target: usize) -> Option<Vec<usize>> {
        let all_ksets = if self.ksets.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.ksets.len()) - 1
        };
        let all_blocks = if self.blocks.len() == 128 {
            u128::MAX
        } else {
            (1u128 << self.blocks.len()) - 1
        };
        let mut node = Node {
            chosen: Vec::new(),
            forbidden: !all_blocks,
            uncovered: all_ksets,
            degree: [0; EXACT_MAX_N],
            // some point has degree at most r * target / n; call it point 0
            max_deg0: self.r * target / self.n,
        };
        let ground = subsets::full(self.n);
        if self.dfs(&mut node, &[1, ground & !1], target) {
            Some(node.chosen)
        } else {
            None
        }
    }

    fn lower_bound(&self, node: &Node) -> usize {
        let uncovered = node.uncovered;
        let count = uncovered.count_ones() as usize;
        if count == 0 {
            return 0;
        }
        let mut max_gain = 0;
        let mut avail = !node.forbidden;
        while avail != 0 {
            let b = avail.trailing_zeros() as usize;
            avail &= avail - 1;
            max_gain = max_gain.max((self.block_cover[b] & uncovered).count_ones() as usize);
        }
        if max_gain == 0 {
            return usize::MAX;
        }
        let by_gain = count.div_ceil(max_gain);
        let deg0 = node.degree[0];
        let incidences: usize = self
            .point_ksets
            .iter()
            .enumerate()
            .map(|(y, &m)| {
                let mut by_sets =
                    ((m & uncovered).count_ones() as usize).div_ceil(self.per_point_in_block);
                if self.per_pair_in_block > 0 && m & uncovered != 0 {
                    let pairs: usize = (0..self.n)
                        .map(|z| {
                            ((self.pair_ksets[y * self.n + z] & uncovered).count_ones() as usize)
                                .div_ceil(self.per_pair_in_block)
                        })
                        .sum();
                    by_sets = by_sets.max(pairs.div_ceil(self.r - 1));
                }
                let floor = if y == 0 {
                    self.link_cover
                } else {
                    self.link_cover.max(deg0)
                };
                by_sets.max(floor.saturating_sub(node.degree[y]))
            })
            .sum();
        by_gain.max(incidences.div_ceil(self.r))
    }

    fn dfs(&self, node: &mut Node, atoms: &[u64], target: usize) -> bool {
        if node.uncovered == 0 {
            return true;
        }
        let remaining = target - node.chosen.len();
        if remaining == 0 || node.degree[0] > node.max_deg0 || self.lower_bound(node) > remaining {
            return false;
        }
        let avail = !node.forbidden;
        // most constrained uncovered k-set, those through point 0 first
        let mut best: Option<(u32, usize)> = None;
        let through_zero = node.uncovered & self.point_ksets[0];
        let mut rest = if through_zero != 0 {
            through_zero
        } else {
            node.uncovered
        };
        while rest != 0 {
            let t = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let options = (self.kset_blocks[t] & avail).count_ones();
            if best.is_none_or(|(o, _)| options < o) {
                best = Some((options, t));
                if options <= 1 {
                    break;
                }
            }
        }
        let (options, t) = best.expect("uncovered set exists");
        if options == 0 {
            return false;
        }
        let atoms_t = refine(atoms, self.ksets[t]);
        let orbits = self.candidate_orbits(node, t, &atoms_t);
        let saved_forbidden = node.forbidden;
        let saved_uncovered = node.uncovered;
        for orbit in &orbits {
            let rep = orbit.rep;
            node.chosen.push(rep);
            node.forbidden |= 1u128 << rep;
            node.uncovered = saved_uncovered & !self.block_cover[rep];
            for y in subsets::members(self.blocks[rep]) {
                node.degree[y] += 1;
            }
            let child_atoms = refine(&atoms_t, self.blocks[rep]);
            if self.dfs(node, &child_atoms, target) {
                return true;
            }
            for y in subsets::members(self.blocks[rep]) {
                node.degree[y] -= 1;
            }
            node.chosen.pop();
            node.uncovered = saved_uncovered;
            // later siblings may assume no block of this orbit
            node.forbidden |= orbit.members;
        }
        node.forbidden = saved_forbidden;
        false
    }

    fn candidate_orbits(&self, node: &Node, t: usize, atoms: &[u64]) -> Vec<Orbit> {
        let tset = self.ksets[t];
        let mut orbits: Vec<(Vec<u8>, Orbit)> = Vec::new();
        let mut cands = self.kset_blocks[t] & !node.forbidden;
        while cands != 0 {
            let b = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            let extra = self.blocks[b] & !tset;
            let signature: Vec<u8> = atoms
                .iter()
                .map(|&a| subsets::size(a & extra) as u8)
                .collect();
            match orbits.iter_mut().find(|(s, _)| *s == signature) {
                Some((_, orbit)) => orbit.members |= 1u128 << b,
                None => orbits.push((
                    signature,
                    Orbit {
                        rep: b,
                        members: 1u128 << b,
                        gain: (self.block_cover[b] & node.uncovered).count_ones(),
                    },
                )),
            }
        }
        let mut orbits: Vec<Orbit> = orbits.into_iter().map(|(_, o)| o).collect();
        orbits.sort_by_key(|o| (std::cmp::Reverse(o.gain), o.rep));
        orbits
    }
}

struct Orbit {
    rep: usize,
    members: u128,
    gain: u32,
}

/// `μ(n, k)` for a given cover size, as an exact rational.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MuEstimate {
    pub n: usize,
    pub k: usize,
    pub cover_size: u64,
    pub mu: Ratio<u64>,
}

impl MuEstimate {
    pub fn as_f64(&self) -> f64 {
        *self.mu.numer() as f64 / *self.mu.denom() as f64
    }
}

/// `μ = coverSize (k+1) / binom(n, k)`.
pub fn mu_of(n: usize, k: usize, cover_size: u64) -> Result<MuEstimate, CoverError> {
    if cover_size == 0 {
        return Err(CoverError::EmptyCover);
    }
    if !(n > k && k > 0) {
        return Err(CoverError::BadParameters { n, r: k + 1, k });
    }
    Ok(MuEstimate {
        n,
        k,
        cover_size,
        mu: Ratio::new(cover_size * (k as u64 + 1), binomial(n as u64, k as u64)),
    })
}

/// One block per line as space-separated 1-based indices.
pub fn write_blocks(design: &CoverDesign) -> String {
    let mut out = String::new();
    for &b in &design.blocks {
        out.push_str(&subsets::display_one_based(b));
        out.push('\n');
    }
    out
}

/// Reads blocks written by [`write_blocks`]; `#` starts a comment line.
pub fn parse_blocks(text: &str, n: usize, r: usize, k: usize) -> Result<CoverDesign, CoverError> {
    let mut blocks = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut block = 0u64;
        for token in line.split_whitespace() {
            match token.parse::<usize>() {
                Ok(v) if (1..=n).contains(&v) && block & (1 << (v - 1)) == 0 => {
                    block |= 1 << (v - 1)
                }
                _ => {
                    return Err(CoverError::BadBlock {
                        line: i + 1,
                        text: line.to_string(),
                    })
                }
            }
        }
        if subsets::size(block) != r {
            return Err(CoverError::BadBlock {
                line: i + 1,
                text: line.to_string(),
            });
        }
        blocks.push(block);
    }
    Ok(CoverDesign { n, r, k, blocks })
}

//! Small vertex sets as bitmasks, binomial coefficients and colex enumeration.
//!
//! Vertex `i` (0-based) is bit `i`; the variable `x_{i+1}` of a formula maps to
//! vertex `i`. All ground sets here have at most 63 elements.

/// Largest ground set supported by the bitmask representation.
pub const MAX_GROUND: usize = 63;

/// Binomial coefficient, 0 when `k > n`.
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    acc as u64
}

/// Bitmask with the lowest `n` bits set.
pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

pub fn size(set: u64) -> usize {
    set.count_ones() as usize
}

/// Iterates the members of a set in ascending order.
pub fn members(set: u64) -> impl Iterator<Item = usize> {
    let mut rest = set;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(v)
        }
    })
}

pub fn from_members<I: IntoIterator<Item = usize>>(items: I) -> u64 {
    items.into_iter().fold(0, |acc, v| acc | (1u64 << v))
}

/// Position of a `k`-subset in colex order among all `k`-subsets of its ground set.
pub fn colex_rank(set: u64) -> usize {
    members(set)
        .enumerate()
        .map(|(i, v)| binomial(v as u64, i as u64 + 1) as usize)
        .sum()
}

/// Inverse of [`colex_rank`].
pub fn colex_unrank(mut rank: usize, k: usize) -> u64 {
    let mut set = 0u64;
    for i in (1..=k).rev() {
        let mut v = i - 1;
        while binomial(v as u64 + 1, i as u64) as usize <= rank {
            v += 1;
        }
        rank -= binomial(v as u64, i as u64) as usize;
        set |= 1u64 << v;
    }
    set
}

/// Next `k`-subset in colex order (Gosper's hack), or `None` past the end of `0..n`.
fn next_colex(set: u64, n: usize) -> Option<u64> {
    if set == 0 {
        return None;
    }
    let c = set & set.wrapping_neg();
    let r = set + c;
    let next = (((r ^ set) >> 2) / c) | r;
    if r == 0 || next > full(n) {
        None
    } else {
        Some(next)
    }
}

/// All `k`-subsets of `{0..n}` in colex order.
pub fn k_subsets(n: usize, k: usize) -> KSubsets {
    assert!(n <= MAX_GROUND, "ground set too large for bitmask sets");
    KSubsets {
        n,
        next: if k > n { None } else { Some(full(k)) },
    }
}

pub struct KSubsets {
    n: usize,
    next: Option<u64>,
}

impl Iterator for KSubsets {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        let cur = self.next?;
        self.next = if cur == 0 {
            None
        } else {
            next_colex(cur, self.n)
        };
        Some(cur)
    }
}

/// All `k`-subsets of the given set, in colex order of the ambient ground set.
pub fn k_subsets_of(set: u64, k: usize) -> impl Iterator<Item = u64> {
    let elems: Vec<usize> = members(set).collect();
    let m = elems.len();
    k_subsets(m, k).map(move |local| from_members(members(local).map(|i| elems[i])))
}

/// Formats a set as 1-based, space-separated indices.
pub fn display_one_based(set: u64) -> String {
    members(set)
        .map(|v| (v + 1).to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn to_one_based(set: u64) -> Vec<usize> {
    members(set).map(|v| v + 1).collect()
}

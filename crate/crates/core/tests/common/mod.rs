//! Shared fixtures and reference implementations for the integration tests.
//!
//! The references here work on plain integer clauses and share no code with
//! the library beyond formula construction, so they serve as oracles.

#![allow(dead_code)]

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ucp_lab::cnf::{Clause, CnfFormula};
use ucp_lab::equivalence::{irredundant_core, is_absorbed, RemovalOrder};

pub fn f(n: usize, rows: &[&[i32]]) -> CnfFormula {
    CnfFormula::from_dimacs_rows(n, rows).unwrap()
}

pub fn clause(values: &[i32]) -> Clause {
    Clause::from_dimacs(values).unwrap()
}

/// Variables of the worked examples.
pub const A: i32 = 1;
pub const B: i32 = 2;
pub const C: i32 = 3;
pub const D: i32 = 4;

pub fn phi0() -> CnfFormula {
    f(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]])
}
pub fn phi1() -> CnfFormula {
    f(3, &[&[A, C], &[B, C]])
}
pub fn phi2() -> CnfFormula {
    f(3, &[&[A, C], &[-A, B, C]])
}
pub fn phi3() -> CnfFormula {
    f(4, &[&[-A, B], &[-A, C], &[-B, -C, D]])
}
pub fn phi4() -> CnfFormula {
    f(4, &[&[-A, B], &[-A, C], &[-B, -C, D], &[-A, D]])
}
pub fn phi5() -> CnfFormula {
    f(3, &[&[-A, B], &[-B, C], &[-C, A]])
}
pub fn phi6() -> CnfFormula {
    f(3, &[&[-A, C], &[-C, B], &[-B, A]])
}

/// The worked-example pairs with their ucp-equivalence status.
pub fn example_pairs() -> Vec<(CnfFormula, CnfFormula, bool)> {
    let widen = |phi: CnfFormula| phi.with_num_vars(4);
    vec![
        (phi1(), phi2(), false),
        (widen(phi3()), phi4(), false),
        (phi5(), phi6(), true),
        (phi1(), phi1(), true),
        (phi4(), phi4(), true),
        (widen(phi1()), widen(phi5()), false),
    ]
}

pub fn rows(phi: &CnfFormula) -> Vec<Vec<i32>> {
    phi.clauses()
        .map(|c| c.iter().map(|l| l.to_dimacs()).collect())
        .collect()
}

/// Textbook propagation: rescan every clause until nothing changes.
/// `None` is the contradiction; the result includes the assumptions.
pub fn naive_ucp(clauses: &[Vec<i32>], assumptions: &[i32]) -> Option<BTreeSet<i32>> {
    let mut set: BTreeSet<i32> = BTreeSet::new();
    for &l in assumptions {
        if set.contains(&-l) {
            return None;
        }
        set.insert(l);
    }
    loop {
        let mut changed = false;
        for c in clauses {
            if c.iter().any(|l| set.contains(l)) {
                continue;
            }
            let open: Vec<i32> = c.iter().copied().filter(|l| !set.contains(&-l)).collect();
            match open.len() {
                0 => return None,
                1 => {
                    set.insert(open[0]);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return Some(set);
        }
    }
}

pub fn eval(clauses: &[Vec<i32>], x: &[bool]) -> bool {
    clauses.iter().all(|c| {
        c.iter()
            .any(|&l| x[l.unsigned_abs() as usize - 1] == (l > 0))
    })
}

pub fn assignments(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u32..1 << n).map(move |bits| (0..n).map(|i| bits >> i & 1 == 1).collect())
}

pub fn models(n: usize, clauses: &[Vec<i32>]) -> Vec<Vec<bool>> {
    assignments(n).filter(|x| eval(clauses, x)).collect()
}

/// All `3^n` consistent partial assignments over `x_1..x_n`.
pub fn partial_assignments(n: usize) -> Vec<Vec<i32>> {
    let mut out = vec![Vec::new()];
    for v in 1..=n as i32 {
        out = out
            .into_iter()
            .flat_map(|a| {
                let mut pos = a.clone();
                pos.push(v);
                let mut neg = a.clone();
                neg.push(-v);
                [a, pos, neg]
            })
            .collect();
    }
    out
}

/// Ucp-equivalence straight from the definition.
pub fn ucp_equivalent_by_definition(n: usize, a: &CnfFormula, b: &CnfFormula) -> bool {
    let (ra, rb) = (rows(a), rows(b));
    partial_assignments(n)
        .iter()
        .all(|alpha| naive_ucp(&ra, alpha) == naive_ucp(&rb, alpha))
}

/// `a ≤_ucp b` from its semantic form: for every α, UCP(a∧α) ⊆ UCP(b∧α)
/// or UCP(b∧α) = ⊥.
pub fn leq_ucp_by_definition(n: usize, a: &CnfFormula, b: &CnfFormula) -> bool {
    let (ra, rb) = (rows(a), rows(b));
    partial_assignments(n).iter().all(|alpha| {
        match (naive_ucp(&ra, alpha), naive_ucp(&rb, alpha)) {
            (_, None) => true,
            (None, Some(_)) => false,
            (Some(x), Some(y)) => x.is_subset(&y),
        }
    })
}

/// A random clause over `1..=n` with distinct variables.
pub fn random_clause<R: Rng>(rng: &mut R, n: usize, max_len: usize) -> Vec<i32> {
    let len = rng.gen_range(1..=max_len.min(n));
    let mut vars: Vec<i32> = (1..=n as i32).collect();
    for i in 0..len {
        let j = rng.gen_range(i..n);
        vars.swap(i, j);
    }
    vars[..len]
        .iter()
        .map(|&v| if rng.gen_bool(0.5) { v } else { -v })
        .collect()
}

pub fn random_formula<R: Rng>(rng: &mut R, n: usize, m: usize, max_len: usize) -> CnfFormula {
    let mut phi = CnfFormula::new(n);
    for _ in 0..m {
        phi.insert(clause(&random_clause(rng, n, max_len))).unwrap();
    }
    phi
}

/// Proptest strategy for formulas over exactly `n` variables.
pub fn formula_over(
    n: usize,
    max_clauses: usize,
    max_len: usize,
) -> impl Strategy<Value = CnfFormula> {
    let lit = (1..=n as i32, any::<bool>()).prop_map(|(v, s)| if s { v } else { -v });
    let clause_s = prop::collection::btree_set(lit, 1..=max_len.min(n))
        .prop_filter_map("tautology", |lits| {
            Clause::from_dimacs(&lits.into_iter().collect::<Vec<_>>()).ok()
        });
    prop::collection::vec(clause_s, 0..=max_clauses)
        .prop_map(move |cs| CnfFormula::from_clauses(n, cs).unwrap())
}

/// Formulas with `1..=max_n` variables.
pub fn formula(
    max_n: usize,
    max_clauses: usize,
    max_len: usize,
) -> impl Strategy<Value = CnfFormula> {
    (1..=max_n).prop_flat_map(move |n| formula_over(n, max_clauses, max_len))
}

/// Subset of `clauses` keeping each with the given probability.
pub fn sample_subset<R: Rng>(rng: &mut R, n: usize, phi: &CnfFormula, keep: f64) -> CnfFormula {
    CnfFormula::from_clauses(n, phi.clauses().filter(|_| rng.gen_bool(keep)).cloned()).unwrap()
}

/// A pair of formulas over the same variables, roughly half of them
/// ucp-equivalent.
pub fn random_pair(seed: u64) -> (CnfFormula, CnfFormula) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=5);
    let m = rng.gen_range(1..=8);
    let a = random_formula(&mut rng, n, m, 3);
    let b = match rng.gen_range(0..4) {
        0 => {
            let m2 = rng.gen_range(1..=8);
            random_formula(&mut rng, n, m2, 3)
        }
        1 => {
            let mut b = a.clone();
            for _ in 0..8 {
                let c = clause(&random_clause(&mut rng, n, 3));
                if is_absorbed(&c, &b) {
                    b.insert(c).unwrap();
                }
            }
            b
        }
        2 => irredundant_core(&a, &RemovalOrder::Shuffled(seed)).unwrap(),
        _ => {
            let mut b = a.clone();
            let c = clause(&random_clause(&mut rng, n, 3));
            b.insert(c).unwrap();
            b
        }
    };
    (a, b)
}

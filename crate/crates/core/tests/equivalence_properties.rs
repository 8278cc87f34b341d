mod common;

use std::collections::BTreeSet;

use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucp_lab::cnf::{Clause, CnfFormula};
use ucp_lab::equivalence::{
    absorbs, irredundant_core, is_absorbed, is_ucp_irredundant, primify, redundant_clauses,
    ucp_equivalent, RemovalOrder,
};
use ucp_lab::symmetric::psi;

/// Clause `C` absorbed by φ, straight from the definition via the naive reference.
fn absorbed_by_reference(c: &Clause, phi: &CnfFormula) -> bool {
    let r = rows(phi);
    let lits: Vec<i32> = c.iter().map(|l| l.to_dimacs()).collect();
    lits.iter().all(|&l| {
        let assume: Vec<i32> = lits.iter().filter(|&&x| x != l).map(|&x| -x).collect();
        naive_ucp(&r, &assume).is_none_or(|s| s.contains(&l))
    })
}

#[test]
fn worked_examples() {
    assert!(!is_absorbed(&clause(&[-A, D]), &phi3()));
    assert!(is_absorbed(&clause(&[-A, D]), &phi4()));
    assert!(absorbs(&phi1(), &phi1()));
    assert!(!absorbs(&phi3(), &phi4()));
    assert!(absorbs(&phi4(), &phi3()));
    assert!(ucp_equivalent(&phi5(), &phi6()));
    assert!(!ucp_equivalent(&phi1(), &phi2()));
    for phi in [phi1(), phi2(), phi3(), phi4(), phi5(), phi6()] {
        assert!(is_ucp_irredundant(&phi));
        for c in phi.clauses() {
            assert!(is_absorbed(c, &phi));
        }
    }
    assert_eq!(
        irredundant_core(&f(2, &[&[1], &[1, 2]]), &RemovalOrder::default()).unwrap(),
        f(2, &[&[1]])
    );
    assert_eq!(primify(&phi2()).unwrap(), phi1());
}

#[test]
fn psi_4_2_irredundancy_matches_clause_by_clause_oracle() {
    let p = psi(4, 2).unwrap();
    let oracle = p
        .clauses()
        .all(|c| !absorbed_by_reference(c, &p.without(c)));
    assert_eq!(is_ucp_irredundant(&p), oracle);
    assert!(!oracle);
}

/// Inclusion-minimal ucp-equivalent subsets, by brute force over all subsets
/// and the definition of ucp-equivalence.
fn minimal_equivalent_subsets(phi: &CnfFormula) -> Vec<CnfFormula> {
    let n = phi.num_vars();
    let clauses: Vec<&Clause> = phi.clauses().collect();
    let m = clauses.len();
    let subset = |mask: u32| {
        CnfFormula::from_clauses(
            n,
            (0..m)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| clauses[i].clone()),
        )
        .unwrap()
    };
    let equivalent: Vec<u32> = (0u32..1 << m)
        .filter(|&mask| ucp_equivalent_by_definition(n, &subset(mask), phi))
        .collect();
    let eq_set: BTreeSet<u32> = equivalent.iter().copied().collect();
    equivalent
        .into_iter()
        .filter(|&mask| (0..m).all(|i| mask >> i & 1 == 0 || !eq_set.contains(&(mask & !(1 << i)))))
        .map(subset)
        .collect()
}

#[test]
fn psi_cores_match_exhaustive_minimal_subsets() {
    for (n, k) in [(3, 1), (3, 2), (4, 1), (4, 2), (4, 3), (5, 4), (6, 5)] {
        let p = psi(n, k).unwrap();
        let minimal = minimal_equivalent_subsets(&p);
        assert!(!minimal.is_empty());
        let clauses: Vec<&Clause> = p.clauses().collect();
        // every minimal subset is reachable by removing its complement first
        for target in &minimal {
            let mut order: Vec<usize> = (0..clauses.len())
                .filter(|&i| !target.contains(clauses[i]))
                .collect();
            order.extend((0..clauses.len()).filter(|&i| target.contains(clauses[i])));
            let core = irredundant_core(&p, &RemovalOrder::Explicit(order)).unwrap();
            assert_eq!(&core, target, "n={n} k={k}");
        }
        // every order lands on one of them
        for seed in 0..100 {
            let core = irredundant_core(&p, &RemovalOrder::Shuffled(seed)).unwrap();
            assert!(minimal.contains(&core), "n={n} k={k} seed={seed}");
        }
        for order in [
            RemovalOrder::LongestFirst,
            RemovalOrder::Canonical,
            RemovalOrder::ReverseCanonical,
        ] {
            assert!(minimal.contains(&irredundant_core(&p, &order).unwrap()));
        }
    }
}

fn triple() -> impl Strategy<Value = (CnfFormula, CnfFormula, CnfFormula)> {
    (2usize..=5).prop_flat_map(|n| {
        (
            formula_over(n, 7, 3),
            formula_over(n, 7, 3),
            formula_over(n, 7, 3),
        )
    })
}

/// A formula and a ucp-equivalent variant, built by adding absorbed clauses
/// and dropping redundant ones.
fn equivalent_variant(phi: &CnfFormula, seed: u64) -> CnfFormula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = phi.num_vars();
    let mut out = phi.clone();
    for _ in 0..6 {
        let c = clause(&random_clause(&mut rng, n, 3));
        if is_absorbed(&c, &out) {
            out.insert(c).unwrap();
        }
    }
    irredundant_core(&out, &RemovalOrder::Shuffled(seed)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn absorption_matches_reference(phi in formula_over(5, 8, 3), c in formula_over(5, 1, 4)) {
        for cl in c.clauses() {
            prop_assert_eq!(is_absorbed(cl, &phi), absorbed_by_reference(cl, &phi));
        }
    }

    #[test]
    fn preorder_laws((a, b, c) in triple()) {
        prop_assert!(absorbs(&a, &a));
        if absorbs(&b, &a) && absorbs(&c, &b) {
            prop_assert!(absorbs(&c, &a));
        }
        // subsets sit below
        let mut ab = a.clone();
        for cl in b.clauses() {
            ab.insert(cl.clone()).unwrap();
        }
        prop_assert!(absorbs(&ab, &a));
    }

    #[test]
    fn equivalence_relation((a, b, c) in triple(), seed in any::<u64>()) {
        prop_assert!(ucp_equivalent(&a, &a));
        prop_assert_eq!(ucp_equivalent(&a, &b), ucp_equivalent(&b, &a));
        let a2 = equivalent_variant(&a, seed);
        let a3 = equivalent_variant(&a2, seed ^ 1);
        prop_assert!(ucp_equivalent(&a, &a2));
        prop_assert!(ucp_equivalent(&a2, &a3));
        prop_assert!(ucp_equivalent(&a, &a3));
        if ucp_equivalent(&a, &b) && ucp_equivalent(&b, &c) {
            prop_assert!(ucp_equivalent(&a, &c));
        }
    }

    #[test]
    fn equivalent_formulas_have_the_same_models(phi in formula_over(5, 9, 3), seed in any::<u64>()) {
        let variant = equivalent_variant(&phi, seed);
        prop_assert!(ucp_equivalent(&phi, &variant));
        prop_assert_eq!(models(5, &rows(&phi)), models(5, &rows(&variant)));
    }

    #[test]
    fn equivalence_matches_definition(n in 1usize..=4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (ma, mb) = (rng.gen_range(0..=7), rng.gen_range(0..=7));
        let a = random_formula(&mut rng, n, ma, 3);
        let b = if rng.gen_bool(0.5) {
            equivalent_variant(&a, seed)
        } else {
            random_formula(&mut rng, n, mb, 3)
        };
        prop_assert_eq!(ucp_equivalent(&a, &b), ucp_equivalent_by_definition(n, &a, &b));
        prop_assert_eq!(absorbs(&b, &a), leq_ucp_by_definition(n, &a, &b));
    }

    #[test]
    fn cores_are_irredundant_equivalent_subsets(phi in formula(6, 14, 4), seed in any::<u64>()) {
        for order in [RemovalOrder::LongestFirst, RemovalOrder::Shuffled(seed)] {
            let core = irredundant_core(&phi, &order).unwrap();
            prop_assert!(core.clauses().all(|c| phi.contains(c)));
            prop_assert!(is_ucp_irredundant(&core));
            prop_assert!(ucp_equivalent(&core, &phi));
        }
        let redundant = redundant_clauses(&phi);
        prop_assert_eq!(redundant.is_empty(), is_ucp_irredundant(&phi));
    }

    /// Every ucp-irredundant formula is at most `n²` times larger than any
    /// ucp-equivalent formula, in clauses and in length.
    #[test]
    fn n_squared_bound(phi in formula(6, 16, 4), seed in any::<u64>()) {
        let n = phi.num_vars();
        let core = irredundant_core(&phi, &RemovalOrder::Shuffled(seed)).unwrap();
        let others = [
            phi.clone(),
            equivalent_variant(&phi, seed),
            irredundant_core(&phi, &RemovalOrder::ShortestFirst).unwrap(),
            irredundant_core(&phi, &RemovalOrder::ReverseCanonical).unwrap(),
        ];
        for star in &others {
            prop_assert!(ucp_equivalent(star, &core));
            prop_assert!(core.size() <= n * n * star.size());
            prop_assert!(core.length() <= n * n * star.length());
        }
    }
}

/// The prime implicates of a random function, which form a propagation
/// complete formula, padded with weakened copies of some of them.
fn padded_prime_formula(n: usize, seed: u64) -> (CnfFormula, Vec<Vec<bool>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let table: Vec<bool> = (0..1 << n).map(|_| rng.gen_bool(0.7)).collect();
    let satisfied = |c: &[i32], x: &[bool]| {
        c.iter()
            .any(|&l| x[l.unsigned_abs() as usize - 1] == (l > 0))
    };
    let all_x: Vec<Vec<bool>> = assignments(n).collect();
    let is_implicate = |c: &[i32]| {
        all_x
            .iter()
            .zip(&table)
            .all(|(x, &t)| !t || satisfied(c, x))
    };
    let mut primes = Vec::new();
    for code in 1..3usize.pow(n as u32) {
        let mut c = Vec::new();
        let mut rest = code;
        for v in 1..=n as i32 {
            match rest % 3 {
                1 => c.push(v),
                2 => c.push(-v),
                _ => {}
            }
            rest /= 3;
        }
        if is_implicate(&c)
            && (0..c.len()).all(|i| {
                let shorter: Vec<i32> = c
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &l)| l)
                    .collect();
                !is_implicate(&shorter)
            })
        {
            primes.push(c);
        }
    }
    let mut phi = CnfFormula::new(n);
    for p in &primes {
        phi.insert(clause(p)).unwrap();
        let free: Vec<i32> = (1..=n as i32)
            .filter(|v| !p.iter().any(|l| l.abs() == *v))
            .collect();
        if !free.is_empty() && rng.gen_bool(0.5) {
            let v = free[rng.gen_range(0..free.len())];
            let mut weak = p.clone();
            weak.push(if rng.gen_bool(0.5) { v } else { -v });
            phi.insert(clause(&weak)).unwrap();
        }
    }
    let models = all_x
        .into_iter()
        .zip(table)
        .filter(|(_, t)| *t)
        .map(|(x, _)| x)
        .collect();
    (phi, models)
}

#[test]
fn primify_outputs_prime_implicates() {
    for seed in 0..60 {
        let n = 2 + (seed as usize % 4);
        let (phi, fmodels) = padded_prime_formula(n, seed);
        if fmodels.is_empty() {
            continue;
        }
        let prime = primify(&phi).unwrap();
        assert!(prime.size() <= phi.size());
        assert!(prime.length() <= phi.length());
        assert!(ucp_equivalent(&prime, &phi));
        let implicate = |c: &[i32]| {
            fmodels.iter().all(|x| {
                c.iter()
                    .any(|&l| x[l.unsigned_abs() as usize - 1] == (l > 0))
            })
        };
        for c in rows(&prime) {
            assert!(implicate(&c), "seed {seed}: {c:?} not an implicate");
            for i in 0..c.len() {
                let shorter: Vec<i32> = c
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &l)| l)
                    .collect();
                assert!(!implicate(&shorter), "seed {seed}: {c:?} not prime");
            }
        }
    }
}

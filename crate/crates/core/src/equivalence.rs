//! Absorption, the `≤_ucp` preorder, ucp-equivalence, ucp-irredundancy,
//! irredundant cores and primification.
//!
//! A clause `C` is absorbed by `φ` when, for every `l ∈ C`, propagation on
//! `φ ∧ ¬(C \ {l})` derives `l` or `⊥`. All decisions here go through that
//! test; nothing enumerates partial assignments.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Lit};
use crate::ucp::{Active, Propagator, Scratch};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EquivalenceError {
    #[error("clause {0} is not an implicate detectable by propagation")]
    NotAnImplicate(String),
    #[error("removal order is not a permutation of the {0} clauses")]
    BadOrder(usize),
}

impl Propagator {
    /// Absorption of `clause` by the active clauses of the compiled formula.
    ///
    /// The empty clause is absorbed exactly when propagation alone reaches `⊥`.
    pub fn absorbs_clause(
        &self,
        clause: &Clause,
        active: Active<'_>,
        scratch: &mut Scratch,
    ) -> bool {
        if clause.is_empty() {
            return self.refutes(&[], active, scratch);
        }
        let mut assumptions: Vec<Lit> = Vec::with_capacity(clause.len());
        clause.iter().all(|target| {
            assumptions.clear();
            assumptions.extend(clause.iter().filter(|&l| l != target).map(|l| !l));
            self.derives(&assumptions, target, active, scratch)
        })
    }
}

/// `true` iff `clause` is absorbed by `formula`.
pub fn is_absorbed(clause: &Clause, formula: &CnfFormula) -> bool {
    Propagator::new(formula).absorbs_clause(clause, Active::All, &mut Scratch::new())
}

/// Decides `lower ≤_ucp upper`: every clause of `lower` is absorbed by `upper`.
pub fn absorbs(upper: &CnfFormula, lower: &CnfFormula) -> bool {
    let prop = Propagator::new(upper);
    let clauses: Vec<&Clause> = lower.clauses().collect();
    clauses
        .par_iter()
        .all(|c| SCRATCH.with(|s| prop.absorbs_clause(c, Active::All, &mut s.borrow_mut())))
}

thread_local! {
    static SCRATCH: std::cell::RefCell<Scratch> = std::cell::RefCell::new(Scratch::new());
}

/// Mutual absorption.
pub fn ucp_equivalent(a: &CnfFormula, b: &CnfFormula) -> bool {
    absorbs(b, a) && absorbs(a, b)
}

/// Clauses of `formula` absorbed by the remaining clauses, in canonical order.
pub fn redundant_clauses(formula: &CnfFormula) -> Vec<Clause> {
    let prop = Propagator::new(formula);
    let clauses: Vec<&Clause> = formula.clauses().collect();
    clauses
        .par_iter()
        .enumerate()
        .filter(|(i, c)| {
            SCRATCH.with(|s| prop.absorbs_clause(c, Active::Except(*i), &mut s.borrow_mut()))
        })
        .map(|(_, c)| (*c).clone())
        .collect()
}

/// `true` iff no clause is absorbed by the others.
pub fn is_ucp_irredundant(formula: &CnfFormula) -> bool {
    let prop = Propagator::new(formula);
    let clauses: Vec<&Clause> = formula.clauses().collect();
    !clauses.par_iter().enumerate().any(|(i, c)| {
        SCRATCH.with(|s| prop.absorbs_clause(c, Active::Except(i), &mut s.borrow_mut()))
    })
}

/// Order in which [`irredundant_core`] tries to drop clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum RemovalOrder {
    /// longest clauses first, ties in canonical order
    #[default]
    LongestFirst,
    ShortestFirst,
    Canonical,
    ReverseCanonical,
    /// a seeded uniform shuffle of the canonical order
    Shuffled(u64),
    /// explicit positions into the canonical clause order
    Explicit(Vec<usize>),
}

impl RemovalOrder {
    fn positions(&self, clauses: &[&Clause]) -> Result<Vec<usize>, EquivalenceError> {
        let m = clauses.len();
        let mut idx: Vec<usize> = (0..m).collect();
        match self {
            RemovalOrder::LongestFirst => {
                idx.sort_by_key(|&i| std::cmp::Reverse(clauses[i].len()));
            }
            RemovalOrder::ShortestFirst => idx.sort_by_key(|&i| clauses[i].len()),
            RemovalOrder::Canonical => {}
            RemovalOrder::ReverseCanonical => idx.reverse(),
            RemovalOrder::Shuffled(seed) => {
                idx.shuffle(&mut ChaCha8Rng::seed_from_u64(*seed));
            }
            RemovalOrder::Explicit(order) => {
                let mut seen = vec![false; m];
                if order.len() != m
                    || order
                        .iter()
                        .any(|&i| i >= m || std::mem::replace(&mut seen[i], true))
                {
                    return Err(EquivalenceError::BadOrder(m));
                }
                idx = order.clone();
            }
        }
        Ok(idx)
    }
}

/// Drops absorbed clauses one at a time in the given order.
///
/// The result is a ucp-irredundant subset of `formula`, ucp-equivalent to it.
/// One pass suffices: removing clauses never makes another clause absorbed.
pub fn irredundant_core(
    formula: &CnfFormula,
    order: &RemovalOrder,
) -> Result<CnfFormula, EquivalenceError> {
    let prop = Propagator::new(formula);
    let clauses: Vec<&Clause> = formula.clauses().collect();
    let mut keep = vec![true; clauses.len()];
    let mut scratch = Scratch::new();
    for i in order.positions(&clauses)? {
        keep[i] = false;
        if !prop.absorbs_clause(clauses[i], Active::Mask(&keep), &mut scratch) {
            keep[i] = true;
        }
    }
    let kept = clauses
        .into_iter()
        .zip(keep)
        .filter(|(_, k)| *k)
        .map(|(c, _)| c.clone());
    Ok(CnfFormula::from_clauses(formula.num_vars(), kept).expect("subset of a valid formula"))
}

/// `true` iff propagation on `formula ∧ ¬C` yields `⊥` or some literal of `C`.
///
/// Sound for any formula; complete when `formula` is propagation complete.
pub fn is_implicate_by_propagation(
    prop: &Propagator,
    clause: &Clause,
    scratch: &mut Scratch,
) -> bool {
    let neg: Vec<Lit> = clause.iter().map(|l| !l).collect();
    match prop.propagate(&neg, Active::All, scratch) {
        crate::ucp::UcpOutcome::Contradiction => true,
        crate::ucp::UcpOutcome::Consistent(lits) => clause.iter().any(|l| lits.contains(&l)),
    }
}

/// Replaces every clause by a prime sub-implicate, dropping literals greedily
/// in canonical order.
///
/// The caller asserts `formula` is propagation complete; implicates are then
/// exactly the clauses [`is_implicate_by_propagation`] accepts.
pub fn primify(formula: &CnfFormula) -> Result<CnfFormula, EquivalenceError> {
    let prop = Propagator::new(formula);
    let mut scratch = Scratch::new();
    let mut out = CnfFormula::new(formula.num_vars());
    for clause in formula.clauses() {
        if !is_implicate_by_propagation(&prop, clause, &mut scratch) {
            return Err(EquivalenceError::NotAnImplicate(clause.to_string()));
        }
        let mut current = clause.clone();
        for lit in clause.iter() {
            let shorter = current.without(lit);
            if is_implicate_by_propagation(&prop, &shorter, &mut scratch) {
                current = shorter;
            }
        }
        out.insert(current).expect("same variable universe");
    }
    Ok(out)
}

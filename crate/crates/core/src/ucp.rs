//! Unit clause propagation.
//!
//! A [`Propagator`] compiles a formula once into flat clause storage with
//! per-literal occurrence lists, then answers propagation queries under
//! assumptions. Clause state is a counter of falsified literals, reset after
//! every query, so a single propagator can be shared by many threads as long
//! as each keeps its own [`Scratch`].

use std::collections::BTreeSet;

use crate::cnf::{CnfFormula, Lit, PartialAssignment};

/// Result of unit propagation: the derived literals, or `⊥`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UcpOutcome {
    Consistent(BTreeSet<Lit>),
    Contradiction,
}

impl UcpOutcome {
    pub fn is_contradiction(&self) -> bool {
        matches!(self, UcpOutcome::Contradiction)
    }

    pub fn literals(&self) -> Option<&BTreeSet<Lit>> {
        match self {
            UcpOutcome::Consistent(lits) => Some(lits),
            UcpOutcome::Contradiction => None,
        }
    }

    /// `true` iff the outcome is `⊥` or contains `lit`.
    pub fn derives(&self, lit: Lit) -> bool {
        match self {
            UcpOutcome::Consistent(lits) => lits.contains(&lit),
            UcpOutcome::Contradiction => true,
        }
    }
}

/// Which clauses of the compiled formula take part in a query.
#[derive(Debug, Clone, Copy)]
pub enum Active<'a> {
    All,
    /// every clause but the one with this index
    Except(usize),
    /// clause `i` takes part iff `mask[i]`
    Mask(&'a [bool]),
}

impl Active<'_> {
    #[inline]
    fn contains(&self, clause: usize) -> bool {
        match *self {
            Active::All => true,
            Active::Except(skip) => clause != skip,
            Active::Mask(mask) => mask[clause],
        }
    }
}

/// Per-query working memory.
#[derive(Debug, Default, Clone)]
pub struct Scratch {
    /// per variable: 0 unassigned, 1 true, -1 false
    value: Vec<i8>,
    false_count: Vec<u32>,
    touched: Vec<u32>,
    trail: Vec<Lit>,
}

impl Scratch {
    pub fn new() -> Scratch {
        Scratch::default()
    }

    fn prepare(&mut self, num_vars: usize, num_clauses: usize) {
        if self.value.len() < num_vars + 1 {
            self.value.resize(num_vars + 1, 0);
        }
        if self.false_count.len() < num_clauses {
            self.false_count.resize(num_clauses, 0);
        }
    }

    fn reset(&mut self) {
        for lit in self.trail.drain(..) {
            self.value[lit.var().index() as usize] = 0;
        }
        for c in self.touched.drain(..) {
            self.false_count[c as usize] = 0;
        }
    }

    #[inline]
    fn lit_value(&self, lit: Lit) -> i8 {
        let v = self.value[lit.var().index() as usize];
        if lit.is_positive() {
            v
        } else {
            -v
        }
    }
}

/// How a propagation query ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Stop {
    Fixpoint,
    Contradiction,
    Target,
}

/// A formula compiled for repeated unit propagation.
#[derive(Debug, Clone)]
pub struct Propagator {
    num_vars: usize,
    /// clause `i` is `lits[start[i]..start[i+1]]`
    start: Vec<u32>,
    lits: Vec<Lit>,
    /// occurrence lists in CSR form, indexed by literal code
    occ_start: Vec<u32>,
    occ: Vec<u32>,
    units: Vec<u32>,
    empties: Vec<u32>,
}

impl Propagator {
    pub fn new(formula: &CnfFormula) -> Propagator {
        Propagator::from_clauses(formula.num_vars(), formula.clauses().map(|c| c.lits()))
    }

    /// Compiles clauses given in any order. Used by tests that shuffle
    /// clause and literal order.
    pub fn from_clauses<'a, I>(num_vars: usize, clauses: I) -> Propagator
    where
        I: IntoIterator<Item = &'a [Lit]>,
    {
        let mut start = vec![0u32];
        let mut lits = Vec::new();
        let mut units = Vec::new();
        let mut empties = Vec::new();
        let mut num_vars = num_vars;
        for (i, clause) in clauses.into_iter().enumerate() {
            match clause.len() {
                0 => empties.push(i as u32),
                1 => units.push(i as u32),
                _ => {}
            }
            for &l in clause {
                num_vars = num_vars.max(l.var().index() as usize);
            }
            lits.extend_from_slice(clause);
            start.push(lits.len() as u32);
        }
        let num_codes = 2 * num_vars;
        let mut counts = vec![0u32; num_codes + 1];
        for l in &lits {
            counts[l.code() + 1] += 1;
        }
        for i in 0..num_codes {
            counts[i + 1] += counts[i];
        }
        let occ_start = counts.clone();
        let mut fill = counts;
        let mut occ = vec![0u32; lits.len()];
        for c in 0..start.len() - 1 {
            for l in &lits[start[c] as usize..start[c + 1] as usize] {
                let slot = &mut fill[l.code()];
                occ[*slot as usize] = c as u32;
                *slot += 1;
            }
        }
        Propagator {
            num_vars,
            start,
            lits,
            occ_start,
            occ,
            units,
            empties,
        }
    }

    pub fn num_clauses(&self) -> usize {
        self.start.len() - 1
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    fn clause(&self, c: usize) -> &[Lit] {
        &self.lits[self.start[c] as usize..self.start[c + 1] as usize]
    }

    /// Clauses containing `lit`.
    fn occurrences(&self, lit: Lit) -> &[u32] {
        let code = lit.code();
        if code + 1 >= self.occ_start.len() {
            return &[];
        }
        &self.occ[self.occ_start[code] as usize..self.occ_start[code + 1] as usize]
    }

    /// Runs propagation; leaves the derived literals on `scratch.trail`.
    fn run(
        &self,
        assumptions: &[Lit],
        active: Active<'_>,
        target: Option<Lit>,
        scratch: &mut Scratch,
    ) -> Stop {
        let max_assumed = assumptions
            .iter()
            .map(|l| l.var().index() as usize)
            .max()
            .unwrap_or(0);
        scratch.prepare(self.num_vars.max(max_assumed), self.num_clauses());
        if self.empties.iter().any(|&c| active.contains(c as usize)) {
            return Stop::Contradiction;
        }

        let enqueue = |lit: Lit, scratch: &mut Scratch| -> Result<(), Stop> {
            match scratch.lit_value(lit) {
                1 => Ok(()),
                -1 => Err(Stop::Contradiction),
                _ => {
                    scratch.value[lit.var().index() as usize] =
                        if lit.is_positive() { 1 } else { -1 };
                    scratch.trail.push(lit);
                    if target == Some(lit) {
                        Err(Stop::Target)
                    } else {
                        Ok(())
                    }
                }
            }
        };

        for &lit in assumptions {
            if let Err(stop) = enqueue(lit, scratch) {
                return stop;
            }
        }
        for &c in &self.units {
            if active.contains(c as usize) {
                if let Err(stop) = enqueue(self.clause(c as usize)[0], scratch) {
                    return stop;
                }
            }
        }

        let mut head = 0;
        while head < scratch.trail.len() {
            let lit = scratch.trail[head];
            head += 1;
            for &c in self.occurrences(!lit) {
                let c = c as usize;
                if !active.contains(c) {
                    continue;
                }
                if scratch.false_count[c] == 0 {
                    scratch.touched.push(c as u32);
                }
                scratch.false_count[c] += 1;
                let clause = self.clause(c);
                let falsified = scratch.false_count[c] as usize;
                if falsified == clause.len() {
                    return Stop::Contradiction;
                }
                if falsified + 1 == clause.len() {
                    let mut open = None;
                    let mut satisfied = false;
                    for &l in clause {
                        match scratch.lit_value(l) {
                            1 => {
                                satisfied = true;
                                break;
                            }
                            0 => open = Some(l),
                            _ => {}
                        }
                    }
                    if satisfied {
                        continue;
                    }
                    match open {
                        Some(l) => {
                            if let Err(stop) = enqueue(l, scratch) {
                                return stop;
                            }
                        }
                        // every literal is false; one is still queued
                        None => return Stop::Contradiction,
                    }
                }
            }
        }
        Stop::Fixpoint
    }

    /// Propagation under assumptions, restricted to the active clauses.
    pub fn propagate(
        &self,
        assumptions: &[Lit],
        active: Active<'_>,
        scratch: &mut Scratch,
    ) -> UcpOutcome {
        let stop = self.run(assumptions, active, None, scratch);
        let outcome = match stop {
            Stop::Contradiction => UcpOutcome::Contradiction,
            _ => UcpOutcome::Consistent(scratch.trail.iter().copied().collect()),
        };
        scratch.reset();
        outcome
    }

    /// `true` iff propagation under the assumptions derives `target` or `⊥`.
    /// Stops as soon as either happens.
    pub fn derives(
        &self,
        assumptions: &[Lit],
        target: Lit,
        active: Active<'_>,
        scratch: &mut Scratch,
    ) -> bool {
        let stop = self.run(assumptions, active, Some(target), scratch);
        let hit = match stop {
            Stop::Contradiction | Stop::Target => true,
            // target may have been among the assumptions or units before the
            // check was armed
            Stop::Fixpoint => scratch.lit_value(target) == 1,
        };
        scratch.reset();
        hit
    }

    /// `true` iff propagation under the assumptions reaches `⊥`.
    pub fn refutes(&self, assumptions: &[Lit], active: Active<'_>, scratch: &mut Scratch) -> bool {
        let stop = self.run(assumptions, active, None, scratch);
        scratch.reset();
        stop == Stop::Contradiction
    }
}

/// `UCP(φ)`.
pub fn ucp(formula: &CnfFormula) -> UcpOutcome {
    ucp_with_assumptions(formula, &PartialAssignment::empty())
}

/// `UCP(φ ∧ α)` with `α` appended as unit clauses.
pub fn ucp_with_assumptions(formula: &CnfFormula, assumptions: &PartialAssignment) -> UcpOutcome {
    let prop = Propagator::new(formula);
    let lits: Vec<Lit> = assumptions.iter().collect();
    prop.propagate(&lits, Active::All, &mut Scratch::new())
}

/// Simplifies `φ` by `α`: clauses containing a literal of `α` are removed and
/// the negations of literals of `α` are erased from the remaining clauses.
///
/// The result may contain the empty clause. An empty `α` leaves `φ` unchanged.
pub fn simplify(formula: &CnfFormula, assumptions: &PartialAssignment) -> CnfFormula {
    let mut out = CnfFormula::new(formula.num_vars());
    for clause in formula.clauses() {
        if clause.iter().any(|l| assumptions.contains(l)) {
            continue;
        }
        let kept = crate::cnf::Clause::new(clause.iter().filter(|&l| !assumptions.contains(!l)))
            .expect("subset of a non-tautological clause");
        out.insert(kept).expect("same variable universe");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Clause;

    fn lits(values: &[i32]) -> BTreeSet<Lit> {
        values
            .iter()
            .map(|&v| Lit::from_dimacs(v).unwrap())
            .collect()
    }

    fn pa(values: &[i32]) -> PartialAssignment {
        PartialAssignment::from_dimacs(values).unwrap()
    }

    #[test]
    fn phi0_derives_nothing() {
        let phi0 =
            CnfFormula::from_dimacs_rows(2, &[&[1, 2], &[1, -2], &[-1, 2], &[-1, -2]]).unwrap();
        assert_eq!(ucp(&phi0), UcpOutcome::Consistent(BTreeSet::new()));
    }

    #[test]
    fn complementary_units() {
        let f = CnfFormula::from_dimacs_rows(1, &[&[1], &[-1]]).unwrap();
        assert_eq!(ucp(&f), UcpOutcome::Contradiction);
    }

    #[test]
    fn units_count_without_propagation() {
        let f = CnfFormula::from_dimacs_rows(3, &[&[2], &[1, 3]]).unwrap();
        assert_eq!(ucp(&f), UcpOutcome::Consistent(lits(&[2])));
    }

    #[test]
    fn empty_clause_is_contradiction() {
        let f = CnfFormula::from_clauses(1, [Clause::empty()]).unwrap();
        assert_eq!(ucp(&f), UcpOutcome::Contradiction);
    }

    #[test]
    fn chains_and_conflicts() {
        // a, a→b, b→c, c→¬a
        let f = CnfFormula::from_dimacs_rows(3, &[&[1], &[-1, 2], &[-2, 3], &[-3, -1]]).unwrap();
        assert_eq!(ucp(&f), UcpOutcome::Contradiction);
        let f = CnfFormula::from_dimacs_rows(3, &[&[-1, 2], &[-2, 3]]).unwrap();
        assert_eq!(
            ucp_with_assumptions(&f, &pa(&[1])),
            UcpOutcome::Consistent(lits(&[1, 2, 3]))
        );
        assert_eq!(
            ucp_with_assumptions(&f, &pa(&[-3])),
            UcpOutcome::Consistent(lits(&[-1, -2, -3]))
        );
    }

    #[test]
    fn assumption_against_unit() {
        let f = CnfFormula::from_dimacs_rows(2, &[&[1]]).unwrap();
        assert!(ucp_with_assumptions(&f, &pa(&[-1])).is_contradiction());
    }

    #[test]
    fn assumptions_outside_the_universe() {
        let f = CnfFormula::from_dimacs_rows(1, &[&[1]]).unwrap();
        assert_eq!(
            ucp_with_assumptions(&f, &pa(&[-4])),
            UcpOutcome::Consistent(lits(&[1, -4]))
        );
    }

    #[test]
    fn masked_queries() {
        let f = CnfFormula::from_dimacs_rows(3, &[&[-1, 2], &[-2, 3]]).unwrap();
        let prop = Propagator::new(&f);
        let mut s = Scratch::new();
        let a = [Lit::from_dimacs(1).unwrap()];
        let three = Lit::from_dimacs(3).unwrap();
        assert!(prop.derives(&a, three, Active::All, &mut s));
        assert!(!prop.derives(&a, three, Active::Except(1), &mut s));
        assert!(!prop.derives(&a, three, Active::Mask(&[true, false]), &mut s));
        assert!(prop.derives(&a, a[0], Active::Mask(&[false, false]), &mut s));
        // scratch is clean after each query
        assert_eq!(
            prop.propagate(&[], Active::All, &mut s),
            UcpOutcome::Consistent(BTreeSet::new())
        );
    }

    #[test]
    fn simplify_by_assignment() {
        // φ₁ = (a∨c)∧(b∨c), α = ¬b
        let phi1 = CnfFormula::from_dimacs_rows(3, &[&[1, 3], &[2, 3]]).unwrap();
        let s = simplify(&phi1, &pa(&[-2]));
        assert_eq!(
            s,
            CnfFormula::from_dimacs_rows(3, &[&[1, 3], &[3]]).unwrap()
        );
        let all = simplify(&phi1, &pa(&[3]));
        assert!(all.is_empty());
        let bottom = simplify(
            &CnfFormula::from_dimacs_rows(1, &[&[1]]).unwrap(),
            &pa(&[-1]),
        );
        assert!(bottom.contains(&Clause::empty()));
    }
}

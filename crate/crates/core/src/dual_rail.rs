//! The implicational dual-rail encoding and Horn equivalence.
//!
//! For a formula over `x_1..x_n` every literal `l` gets a rail variable `⟦l⟧`:
//! `⟦x_i⟧` is variable `i` and `⟦¬x_i⟧` is variable `n + i`. A clause
//! `l_1 ∨ … ∨ l_k` becomes the `k` definite Horn clauses
//! `⋀_{j≠i} ⟦¬l_j⟧ → ⟦l_i⟧`, and every variable contributes the consistency
//! clause `¬⟦x_i⟧ ∨ ¬⟦¬x_i⟧`. Two formulas are ucp-equivalent exactly when
//! their encodings are logically equivalent, which gives an oracle for
//! [`crate::equivalence::ucp_equivalent`] that never runs propagation on the
//! original formulas.

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Lit, Var};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DualRailError {
    #[error("the empty clause has no dual-rail encoding")]
    EmptyClause,
    #[error("clause {0} has more than one positive literal")]
    NotHorn(String),
}

/// Rail variable of a base literal, for a base formula over `n` variables.
pub fn rail_var(lit: Lit, n: usize) -> Var {
    let i = lit.var().index();
    let v = if lit.is_positive() { i } else { n as u32 + i };
    Var::new(v).expect("rail variables are positive")
}

/// Base literal encoded by a rail variable.
pub fn base_lit(rail: Var, n: usize) -> Lit {
    let v = rail.index() as usize;
    assert!(v >= 1 && v <= 2 * n, "rail variable out of range");
    if v <= n {
        Var::new(v as u32).unwrap().positive()
    } else {
        Var::new((v - n) as u32).unwrap().negative()
    }
}

/// A CNF formula whose clauses each have at most one positive literal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HornFormula {
    formula: CnfFormula,
}

impl HornFormula {
    pub fn new(formula: CnfFormula) -> Result<HornFormula, DualRailError> {
        if let Some(c) = formula.clauses().find(|c| c.positive_count() > 1) {
            return Err(DualRailError::NotHorn(c.to_string()));
        }
        Ok(HornFormula { formula })
    }

    pub fn formula(&self) -> &CnfFormula {
        &self.formula
    }

    pub fn into_formula(self) -> CnfFormula {
        self.formula
    }

    pub fn num_vars(&self) -> usize {
        self.formula.num_vars()
    }

    pub fn size(&self) -> usize {
        self.formula.size()
    }

    pub fn clauses(&self) -> impl Iterator<Item = &Clause> + '_ {
        self.formula.clauses()
    }
}

/// Dual-rail encoding of `formula`, over `2n` rail variables.
pub fn idr(formula: &CnfFormula) -> Result<HornFormula, DualRailError> {
    let n = formula.num_vars();
    let mut out = CnfFormula::new(2 * n);
    for clause in formula.clauses() {
        if clause.is_empty() {
            return Err(DualRailError::EmptyClause);
        }
        for head in clause.iter() {
            let lits = clause
                .iter()
                .filter(|&l| l != head)
                .map(|l| rail_var(!l, n).negative())
                .chain(std::iter::once(rail_var(head, n).positive()));
            out.insert(Clause::new(lits).expect("rail literals are distinct"))
                .expect("rail variables within range");
        }
    }
    for i in 1..=n as u32 {
        let x = Var::new(i).unwrap();
        let c = Clause::new([
            rail_var(x.positive(), n).negative(),
            rail_var(x.negative(), n).negative(),
        ])
        .unwrap();
        out.insert(c).expect("rail variables within range");
    }
    Ok(HornFormula { formula: out })
}

/// Forward chaining over a compiled Horn formula.
///
/// Each clause is a body of variables that must all be true and an optional
/// head; a clause without a head is a goal whose firing means inconsistency.
#[derive(Debug, Clone)]
pub struct HornChainer {
    num_vars: usize,
    body_len: Vec<u32>,
    head: Vec<Option<u32>>,
    /// clauses whose body contains each variable
    watch: Vec<Vec<u32>>,
    facts: Vec<u32>,
    goal_empty: bool,
}

impl HornChainer {
    pub fn new(horn: &HornFormula) -> HornChainer {
        let num_vars = horn.num_vars();
        let mut body_len = Vec::new();
        let mut head = Vec::new();
        let mut watch = vec![Vec::new(); num_vars + 1];
        let mut facts = Vec::new();
        let mut goal_empty = false;
        for clause in horn.clauses() {
            let idx = body_len.len() as u32;
            let mut len = 0;
            let mut h = None;
            for l in clause.iter() {
                let v = l.var().index();
                if l.is_positive() {
                    h = Some(v);
                } else {
                    watch[v as usize].push(idx);
                    len += 1;
                }
            }
            match (len, h) {
                (0, Some(v)) => facts.push(v),
                (0, None) => goal_empty = true,
                _ => {}
            }
            body_len.push(len);
            head.push(h);
        }
        HornChainer {
            num_vars,
            body_len,
            head,
            watch,
            facts,
            goal_empty,
        }
    }

    /// `true` iff the Horn formula implies `clause`.
    ///
    /// The negated clause contributes its negative literals as facts and its
    /// positive literals as forbidden variables; the implication holds iff
    /// chaining derives a forbidden variable or fires a goal clause.
    pub fn implies(&self, clause: &Clause) -> bool {
        if self.goal_empty {
            return true;
        }
        let width = self.num_vars.max(clause.max_var() as usize) + 1;
        let mut forbidden = vec![false; width];
        for l in clause.iter().filter(|l| l.is_positive()) {
            forbidden[l.var().index() as usize] = true;
        }
        let mut derived = vec![false; width];
        let mut remaining = self.body_len.clone();
        let mut queue: Vec<u32> = self.facts.clone();
        queue.extend(
            clause
                .iter()
                .filter(|l| !l.is_positive())
                .map(|l| l.var().index()),
        );
        while let Some(v) = queue.pop() {
            if derived[v as usize] {
                continue;
            }
            if forbidden[v as usize] {
                return true;
            }
            derived[v as usize] = true;
            let Some(watchers) = self.watch.get(v as usize) else {
                continue;
            };
            for &c in watchers {
                let r = &mut remaining[c as usize];
                *r -= 1;
                if *r == 0 {
                    match self.head[c as usize] {
                        Some(h) => queue.push(h),
                        None => return true,
                    }
                }
            }
        }
        false
    }
}

/// `true` iff every model of `horn` satisfies `clause`.
pub fn horn_implies(horn: &HornFormula, clause: &Clause) -> bool {
    HornChainer::new(horn).implies(clause)
}

/// `true` iff each formula implies every clause of the other.
pub fn horn_equivalent(a: &HornFormula, b: &HornFormula) -> bool {
    let implies_all = |from: &HornFormula, to: &HornFormula| {
        let chainer = HornChainer::new(from);
        let clauses: Vec<&Clause> = to.clauses().collect();
        clauses.par_iter().all(|c| chainer.implies(c))
    };
    implies_all(a, b) && implies_all(b, a)
}

/// Ucp-equivalence decided through the dual-rail encodings.
pub fn ucp_equivalent_via_idr(a: &CnfFormula, b: &CnfFormula) -> Result<bool, DualRailError> {
    let n = a.num_vars().max(b.num_vars());
    let a = idr(&a.clone().with_num_vars(n))?;
    let b = idr(&b.clone().with_num_vars(n))?;
    Ok(horn_equivalent(&a, &b))
}

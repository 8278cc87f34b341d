//! Propositional data model: variables, literals, clauses, CNF formulas and
//! partial assignments, plus DIMACS CNF reading and writing.
//!
//! Formulas are sets of clauses and clauses are sets of literals. Both are kept
//! in a canonical sorted order so equality is structural and DIMACS output is
//! deterministic.

use std::collections::BTreeSet;
use std::fmt;
use std::io::Read;
use std::ops::Not;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause contains both x{0} and -x{0}")]
    Tautology(u32),
    #[error("variable {var} out of range 1..={num_vars}")]
    VarOutOfRange { var: u32, num_vars: usize },
    #[error("partial assignment sets x{0} both ways")]
    Inconsistent(u32),
    #[error("literal 0 is not a valid literal")]
    ZeroLiteral,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: variable {var} exceeds declared count {num_vars}")]
    VarOutOfRange {
        line: usize,
        var: u32,
        num_vars: usize,
    },
    #[error("line {line}: tautological clause (contains x{var} and -x{var})")]
    Tautology { line: usize, var: u32 },
    #[error("io error: {0}")]
    Io(String),
}

/// A propositional variable `x_i`, `i >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    pub fn new(index: u32) -> Option<Var> {
        (index >= 1 && index <= i32::MAX as u32).then_some(Var(index))
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn positive(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn negative(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

/// A literal in DIMACS convention: `i` is `x_i`, `-i` is `¬x_i`.
///
/// Literals order by variable, the positive literal first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn from_dimacs(value: i32) -> Result<Lit, CnfError> {
        if value == 0 || value == i32::MIN {
            Err(CnfError::ZeroLiteral)
        } else {
            Ok(Lit(value))
        }
    }

    pub fn new(var: Var, positive: bool) -> Lit {
        if positive {
            var.positive()
        } else {
            var.negative()
        }
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Dense index: `2(i-1)` for `x_i`, `2(i-1)+1` for `¬x_i`.
    pub fn code(self) -> usize {
        2 * (self.0.unsigned_abs() as usize - 1) + usize::from(self.0 < 0)
    }

    pub fn from_code(code: usize) -> Lit {
        let var = (code / 2 + 1) as i32;
        if code.is_multiple_of(2) {
            Lit(var)
        } else {
            Lit(-var)
        }
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl Ord for Lit {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.code().cmp(&other.code())
    }
}

impl PartialOrd for Lit {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A disjunction of literals on distinct variables. The empty clause is `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Builds a clause, collapsing repeated literals and rejecting tautologies.
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Result<Clause, CnfError> {
        let mut lits: Vec<Lit> = lits.into_iter().collect();
        lits.sort();
        lits.dedup();
        if let Some(w) = lits.windows(2).find(|w| w[0].var() == w[1].var()) {
            return Err(CnfError::Tautology(w[0].var().index()));
        }
        Ok(Clause(lits))
    }

    /// Builds a clause from DIMACS integers.
    pub fn from_dimacs(values: &[i32]) -> Result<Clause, CnfError> {
        let lits = values
            .iter()
            .map(|&v| Lit::from_dimacs(v))
            .collect::<Result<Vec<_>, _>>()?;
        Clause::new(lits)
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.binary_search(&lit).is_ok()
    }

    /// `C \ {l}`.
    pub fn without(&self, lit: Lit) -> Clause {
        Clause(self.0.iter().copied().filter(|&l| l != lit).collect())
    }

    /// The literals `¬l` for `l ∈ C`, as a conjunction of units.
    pub fn negation(&self) -> PartialAssignment {
        PartialAssignment(self.0.iter().map(|&l| !l).collect())
    }

    pub fn max_var(&self) -> u32 {
        self.0.iter().map(|l| l.var().index()).max().unwrap_or(0)
    }

    pub fn positive_count(&self) -> usize {
        self.0.iter().filter(|l| l.is_positive()).count()
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "⊥");
        }
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "({})", parts.join(" ∨ "))
    }
}

/// A CNF formula over variables `x_1..x_n`; a set of clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CnfFormula {
    num_vars: usize,
    clauses: BTreeSet<Clause>,
}

impl CnfFormula {
    pub fn new(num_vars: usize) -> CnfFormula {
        CnfFormula {
            num_vars,
            clauses: BTreeSet::new(),
        }
    }

    pub fn from_clauses<I: IntoIterator<Item = Clause>>(
        num_vars: usize,
        clauses: I,
    ) -> Result<CnfFormula, CnfError> {
        let mut f = CnfFormula::new(num_vars);
        for c in clauses {
            f.insert(c)?;
        }
        Ok(f)
    }

    /// Convenience constructor from DIMACS integer rows.
    pub fn from_dimacs_rows(num_vars: usize, rows: &[&[i32]]) -> Result<CnfFormula, CnfError> {
        let clauses = rows
            .iter()
            .map(|r| Clause::from_dimacs(r))
            .collect::<Result<Vec<_>, _>>()?;
        CnfFormula::from_clauses(num_vars, clauses)
    }

    /// Adds a clause; returns `false` if it was already present.
    pub fn insert(&mut self, clause: Clause) -> Result<bool, CnfError> {
        let var = clause.max_var();
        if var as usize > self.num_vars {
            return Err(CnfError::VarOutOfRange {
                var,
                num_vars: self.num_vars,
            });
        }
        Ok(self.clauses.insert(clause))
    }

    pub fn remove(&mut self, clause: &Clause) -> bool {
        self.clauses.remove(clause)
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    /// Widens the variable universe; never shrinks it.
    pub fn with_num_vars(mut self, num_vars: usize) -> CnfFormula {
        self.num_vars = self.num_vars.max(num_vars);
        self
    }

    pub fn clauses(&self) -> impl ExactSizeIterator<Item = &Clause> + '_ {
        self.clauses.iter()
    }

    pub fn contains(&self, clause: &Clause) -> bool {
        self.clauses.contains(clause)
    }

    /// `|φ|`, the number of clauses.
    pub fn size(&self) -> usize {
        self.clauses.len()
    }

    /// `‖φ‖`, the sum of clause lengths.
    pub fn length(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    /// `φ \ {C}`.
    pub fn without(&self, clause: &Clause) -> CnfFormula {
        let mut f = self.clone();
        f.clauses.remove(clause);
        f
    }

    /// `true` iff every clause has at most one positive literal.
    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(|c| c.positive_count() <= 1)
    }

    /// Truth value under a total assignment, `assignment[i]` being `x_{i+1}`.
    pub fn evaluate(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| {
            c.iter()
                .any(|l| assignment[l.var().index() as usize - 1] == l.is_positive())
        })
    }
}

impl<'a> IntoIterator for &'a CnfFormula {
    type Item = &'a Clause;
    type IntoIter = std::collections::btree_set::Iter<'a, Clause>;

    fn into_iter(self) -> Self::IntoIter {
        self.clauses.iter()
    }
}

/// `(|φ|, ‖φ‖)`.
pub fn formula_length(formula: &CnfFormula) -> (usize, usize) {
    (formula.size(), formula.length())
}

/// A consistent set of literals, read as a conjunction of unit clauses.
#[derive(Debug, Clone, PartialEq, Eq, Default, PartialOrd, Ord, Hash)]
pub struct PartialAssignment(BTreeSet<Lit>);

impl PartialAssignment {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Result<PartialAssignment, CnfError> {
        let set: BTreeSet<Lit> = lits.into_iter().collect();
        if let Some(l) = set.iter().find(|&&l| l.is_positive() && set.contains(&!l)) {
            return Err(CnfError::Inconsistent(l.var().index()));
        }
        Ok(PartialAssignment(set))
    }

    pub fn from_dimacs(values: &[i32]) -> Result<PartialAssignment, CnfError> {
        let lits = values
            .iter()
            .map(|&v| Lit::from_dimacs(v))
            .collect::<Result<Vec<_>, _>>()?;
        PartialAssignment::new(lits)
    }

    pub fn empty() -> PartialAssignment {
        PartialAssignment(BTreeSet::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.0.contains(&lit)
    }

    pub fn iter(&self) -> impl Iterator<Item = Lit> + '_ {
        self.0.iter().copied()
    }

    pub fn lits(&self) -> &BTreeSet<Lit> {
        &self.0
    }

    pub fn max_var(&self) -> u32 {
        self.0.iter().map(|l| l.var().index()).max().unwrap_or(0)
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|l| l.to_string()).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// Parses DIMACS CNF text.
///
/// Comment lines start with `c`. Clauses are zero-terminated and may span
/// lines. The clause count in the header must match the number of clauses
/// read; duplicate clauses are then collapsed.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut formula = CnfFormula::new(0);
    let mut pending: Vec<i32> = Vec::new();
    let mut pending_line = 0;
    let mut read_clauses = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('c') {
            continue;
        }
        if trimmed.starts_with('p') {
            if header.is_some() {
                return Err(syntax(line, "duplicate problem line"));
            }
            let parts: Vec<&str> = trimmed.split_whitespace().collect();
            if parts.len() != 4 || parts[0] != "p" || parts[1] != "cnf" {
                return Err(syntax(line, "expected `p cnf <vars> <clauses>`"));
            }
            let vars = parts[2]
                .parse::<usize>()
                .map_err(|_| syntax(line, "bad variable count"))?;
            let clauses = parts[3]
                .parse::<usize>()
                .map_err(|_| syntax(line, "bad clause count"))?;
            header = Some((vars, clauses));
            formula = CnfFormula::new(vars);
            continue;
        }
        let Some((num_vars, _)) = header else {
            return Err(syntax(line, "clause before problem line"));
        };
        for token in trimmed.split_whitespace() {
            let value: i32 = token
                .parse()
                .map_err(|_| syntax(line, &format!("invalid literal `{token}`")))?;
            if pending.is_empty() {
                pending_line = line;
            }
            if value == 0 {
                let clause = Clause::from_dimacs(&pending).map_err(|e| match e {
                    CnfError::Tautology(var) => DimacsError::Tautology {
                        line: pending_line,
                        var,
                    },
                    other => syntax(pending_line, &other.to_string()),
                })?;
                let var = clause.max_var();
                if var as usize > num_vars {
                    return Err(DimacsError::VarOutOfRange {
                        line: pending_line,
                        var,
                        num_vars,
                    });
                }
                formula
                    .insert(clause)
                    .expect("variable range checked above");
                read_clauses += 1;
                pending.clear();
            } else {
                if value == i32::MIN {
                    return Err(syntax(line, "literal out of range"));
                }
                pending.push(value);
            }
        }
    }

    let Some((_, declared)) = header else {
        return Err(syntax(0, "missing problem line"));
    };
    if !pending.is_empty() {
        return Err(syntax(pending_line, "clause not terminated by 0"));
    }
    if read_clauses != declared {
        return Err(syntax(
            0,
            &format!("header declares {declared} clauses, found {read_clauses}"),
        ));
    }
    Ok(formula)
}

fn syntax(line: usize, message: &str) -> DimacsError {
    DimacsError::Syntax {
        line,
        message: message.to_string(),
    }
}

/// Reads and parses DIMACS CNF from a byte stream.
pub fn read_dimacs<R: Read>(mut reader: R) -> Result<CnfFormula, DimacsError> {
    let mut text = String::new();
    reader
        .read_to_string(&mut text)
        .map_err(|e| DimacsError::Io(e.to_string()))?;
    parse_dimacs(&text)
}

/// Writes DIMACS CNF with clauses in ascending canonical order.
pub fn emit_dimacs(formula: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", formula.num_vars(), formula.size());
    for clause in formula.clauses() {
        for lit in clause.iter() {
            out.push_str(&lit.to_dimacs().to_string());
            out.push(' ');
        }
        out.push_str("0\n");
    }
    out
}

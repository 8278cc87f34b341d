//! The symmetric family `Ψ_{n,k}` and the hypergraph formulas built inside it.
//!
//! `Ψ_{n,k}` holds every clause with `k` negative literals and one positive
//! literal over `x_1..x_n`. It represents
//! `f_{n,k}(x) = 1 ⇔ Σx < k ∨ Σx = n` and is propagation complete. For a
//! `(k+1)`-uniform hypergraph `H`, the formula `θ(H)` keeps, for each edge
//! `e` and `x ∈ e`, the clause `¬(e \ {x}) ∨ x`.
//!
//! A formula `φ ⊆ Ψ_{n,k}` is ucp-equivalent to `Ψ_{n,k}` iff for every
//! `(k−1)`-set `A` the digraph `G^d(φ, A)` on `X \ A` is strongly connected,
//! where `(i, j)` is an arc when `¬A ∨ ¬x_i ∨ x_j ∈ φ`. For `φ = θ(H)` the
//! digraphs are symmetric and the test becomes connectivity of
//! `G(H, A) = {e \ A : A ⊆ e ∈ H}`.
//!
//! Vertex `i` (0-based bit) is the variable `x_{i+1}`. All restriction graphs
//! for one formula are built in a single pass over its clauses and indexed by
//! the colex rank of `A`.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::cnf::{Clause, CnfFormula, Var};
use crate::subsets::{self, binomial, colex_rank, colex_unrank, full, members, size, MAX_GROUND};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SymmetricError {
    #[error("parameters need 1 <= k <= n-1 and n <= {max}, got n={n} k={k}", max = MAX_GROUND)]
    BadParameters { n: usize, k: usize },
    #[error("hyperedge {{{edge}}} does not have {expected} vertices in 1..={n}")]
    BadEdge {
        edge: String,
        expected: usize,
        n: usize,
    },
    #[error("clause {0} is not a clause of the symmetric formula")]
    NotInPsi(String),
    #[error("base set {{{set}}} must have {expected} vertices in 1..={n}")]
    BadBase {
        set: String,
        expected: usize,
        n: usize,
    },
}

fn check_params(n: usize, k: usize) -> Result<(), SymmetricError> {
    if k == 0 || k >= n || n > MAX_GROUND {
        return Err(SymmetricError::BadParameters { n, k });
    }
    Ok(())
}

/// The clause `¬neg ∨ x_pos`.
pub fn horn_clause(neg: u64, pos: usize) -> Clause {
    let lits = members(neg)
        .map(|i| Var::new(i as u32 + 1).unwrap().negative())
        .chain(std::iter::once(
            Var::new(pos as u32 + 1).unwrap().positive(),
        ));
    Clause::new(lits).expect("negative and positive parts are disjoint")
}

/// Splits a clause of `Ψ_{n,k}` into its negative set and positive vertex.
pub fn split_psi_clause(
    clause: &Clause,
    n: usize,
    k: usize,
) -> Result<(u64, usize), SymmetricError> {
    let not_in_psi = || SymmetricError::NotInPsi(clause.to_string());
    if clause.len() != k + 1 || clause.positive_count() != 1 || clause.max_var() as usize > n {
        return Err(not_in_psi());
    }
    let mut neg = 0u64;
    let mut pos = 0usize;
    for l in clause.iter() {
        let v = l.var().index() as usize - 1;
        if l.is_positive() {
            pos = v;
        } else {
            neg |= 1 << v;
        }
    }
    Ok((neg, pos))
}

/// All clauses with `k` negative literals and one positive literal.
pub fn psi(n: usize, k: usize) -> Result<CnfFormula, SymmetricError> {
    check_params(n, k)?;
    let mut out = CnfFormula::new(n);
    for neg in subsets::k_subsets(n, k) {
        for pos in members(full(n) & !neg) {
            out.insert(horn_clause(neg, pos)).expect("within range");
        }
    }
    Ok(out)
}

/// The symmetric function: true iff fewer than `k` ones or all ones.
///
/// Panics if `assignment.len() != n`.
pub fn f_eval(n: usize, k: usize, assignment: &[bool]) -> bool {
    assert_eq!(assignment.len(), n, "assignment length must equal n");
    let ones = assignment.iter().filter(|&&b| b).count();
    ones < k || ones == n
}

/// A `(k+1)`-uniform hypergraph on vertices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypergraph {
    n: usize,
    k: usize,
    edges: BTreeSet<u64>,
}

impl Hypergraph {
    pub fn new(n: usize, k: usize) -> Result<Hypergraph, SymmetricError> {
        check_params(n, k)?;
        Ok(Hypergraph {
            n,
            k,
            edges: BTreeSet::new(),
        })
    }

    pub fn from_edges<I: IntoIterator<Item = u64>>(
        n: usize,
        k: usize,
        edges: I,
    ) -> Result<Hypergraph, SymmetricError> {
        let mut h = Hypergraph::new(n, k)?;
        for e in edges {
            h.insert(e)?;
        }
        Ok(h)
    }

    /// `H₀`: every `(k+1)`-subset.
    pub fn complete(n: usize, k: usize) -> Result<Hypergraph, SymmetricError> {
        check_params(n, k)?;
        Hypergraph::from_edges(n, k, subsets::k_subsets(n, k + 1))
    }

    /// `H₁`: every `(k+1)`-subset containing vertex 0.
    pub fn star(n: usize, k: usize) -> Result<Hypergraph, SymmetricError> {
        check_params(n, k)?;
        let rest = subsets::k_subsets(n - 1, k).map(|s| (s << 1) | 1);
        Hypergraph::from_edges(n, k, rest)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn insert(&mut self, edge: u64) -> Result<bool, SymmetricError> {
        if size(edge) != self.k + 1 || edge & !full(self.n) != 0 {
            return Err(SymmetricError::BadEdge {
                edge: subsets::display_one_based(edge),
                expected: self.k + 1,
                n: self.n,
            });
        }
        Ok(self.edges.insert(edge))
    }

    pub fn remove(&mut self, edge: u64) -> bool {
        self.edges.remove(&edge)
    }

    pub fn contains(&self, edge: u64) -> bool {
        self.edges.contains(&edge)
    }

    /// Edges in colex order.
    pub fn edges(&self) -> impl ExactSizeIterator<Item = u64> + '_ {
        self.edges.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// `θ(H)`: for each edge `e` and `x ∈ e`, the clause `¬(e \ {x}) ∨ x`.
pub fn theta(h: &Hypergraph) -> CnfFormula {
    let mut out = CnfFormula::new(h.n);
    for e in h.edges() {
        for x in members(e) {
            out.insert(horn_clause(e & !(1 << x), x))
                .expect("within range");
        }
    }
    out
}

/// `φ^ℓ = θ(H₁)`.
pub fn phi_ell(n: usize, k: usize) -> Result<CnfFormula, SymmetricError> {
    Ok(theta(&Hypergraph::star(n, k)?))
}

/// Expected `|φ^ℓ| = (k+1)·C(n−1, k)`.
pub fn phi_ell_size(n: usize, k: usize) -> u64 {
    (k as u64 + 1) * binomial(n as u64 - 1, k as u64)
}

fn check_base(n: usize, k: usize, base: u64) -> Result<(), SymmetricError> {
    if size(base) != k - 1 || base & !full(n) != 0 {
        return Err(SymmetricError::BadBase {
            set: subsets::display_one_based(base),
            expected: k - 1,
            n,
        });
    }
    Ok(())
}

/// Breadth-first closure of `start` inside `within` along adjacency masks.
fn reach(adj: &[u64], start: usize, within: u64) -> u64 {
    let mut seen = 1u64 << start;
    let mut frontier = seen;
    while frontier != 0 {
        let mut next = 0u64;
        for v in members(frontier) {
            next |= adj[v];
        }
        next &= within & !seen;
        seen |= next;
        frontier = next;
    }
    seen
}

/// `G^d(φ, A)` as out- and in-adjacency masks over all `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraphOnRest {
    pub base: u64,
    n: usize,
    out: Vec<u64>,
    into: Vec<u64>,
}

impl DirectedGraphOnRest {
    fn empty(n: usize, base: u64) -> DirectedGraphOnRest {
        DirectedGraphOnRest {
            base,
            n,
            out: vec![0; n],
            into: vec![0; n],
        }
    }

    fn add_arc(&mut self, from: usize, to: usize) {
        self.out[from] |= 1 << to;
        self.into[to] |= 1 << from;
    }

    /// Vertex set `X \ A`.
    pub fn rest(&self) -> u64 {
        full(self.n) & !self.base
    }

    pub fn has_arc(&self, from: usize, to: usize) -> bool {
        self.out[from] & (1 << to) != 0
    }

    pub fn arcs(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| members(self.out[i]).map(move |j| (i, j)))
            .collect()
    }

    pub fn out_neighbours(&self, v: usize) -> u64 {
        self.out[v]
    }

    /// Vertices with a directed path to `target`, `target` included.
    pub fn reaching(&self, target: usize) -> u64 {
        reach(&self.into, target, self.rest())
    }

    /// Vertices reachable from `source`, `source` included.
    pub fn reachable_from(&self, source: usize) -> u64 {
        reach(&self.out, source, self.rest())
    }

    pub fn is_strongly_connected(&self) -> bool {
        let rest = self.rest();
        if rest == 0 {
            return true;
        }
        let s = rest.trailing_zeros() as usize;
        self.reachable_from(s) == rest && self.reaching(s) == rest
    }
}

/// `G(H, A)` as symmetric adjacency masks over all `n` vertices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UndirectedGraphOnRest {
    pub base: u64,
    n: usize,
    adj: Vec<u64>,
}

impl UndirectedGraphOnRest {
    fn empty(n: usize, base: u64) -> UndirectedGraphOnRest {
        UndirectedGraphOnRest {
            base,
            n,
            adj: vec![0; n],
        }
    }

    fn add_edge(&mut self, a: usize, b: usize) {
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn rest(&self) -> u64 {
        full(self.n) & !self.base
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] & (1 << b) != 0
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|i| members(self.adj[i] & !full(i + 1)).map(move |j| (i, j)))
            .collect()
    }

    /// Connected components of `X \ A`, ordered by least vertex.
    pub fn components(&self) -> Vec<u64> {
        let mut left = self.rest();
        let mut out = Vec::new();
        while left != 0 {
            let comp = reach(&self.adj, left.trailing_zeros() as usize, self.rest());
            out.push(comp);
            left &= !comp;
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        let rest = self.rest();
        rest == 0 || reach(&self.adj, rest.trailing_zeros() as usize, rest) == rest
    }
}

/// All `G^d(φ, A)` indexed by the colex rank of `A`.
pub fn directed_restriction_graphs(
    formula: &CnfFormula,
    k: usize,
) -> Result<Vec<DirectedGraphOnRest>, SymmetricError> {
    let n = formula.num_vars();
    check_params(n, k)?;
    let mut graphs: Vec<DirectedGraphOnRest> = subsets::k_subsets(n, k - 1)
        .map(|a| DirectedGraphOnRest::empty(n, a))
        .collect();
    for clause in formula.clauses() {
        let (neg, pos) = split_psi_clause(clause, n, k)?;
        for i in members(neg) {
            graphs[colex_rank(neg & !(1 << i))].add_arc(i, pos);
        }
    }
    Ok(graphs)
}

/// `G^d(φ, A)` for a single base set.
pub fn g_directed(
    formula: &CnfFormula,
    k: usize,
    base: u64,
) -> Result<DirectedGraphOnRest, SymmetricError> {
    let n = formula.num_vars();
    check_params(n, k)?;
    check_base(n, k, base)?;
    let mut g = DirectedGraphOnRest::empty(n, base);
    for clause in formula.clauses() {
        let (neg, pos) = split_psi_clause(clause, n, k)?;
        if neg & base == base {
            g.add_arc((neg & !base).trailing_zeros() as usize, pos);
        }
    }
    Ok(g)
}

/// All `G(H, A)` indexed by the colex rank of `A`.
pub fn undirected_restriction_graphs(h: &Hypergraph) -> Vec<UndirectedGraphOnRest> {
    let (n, k) = (h.n, h.k);
    let mut graphs: Vec<UndirectedGraphOnRest> = subsets::k_subsets(n, k - 1)
        .map(|a| UndirectedGraphOnRest::empty(n, a))
        .collect();
    for e in h.edges() {
        for pair in subsets::k_subsets_of(e, 2) {
            let a = pair.trailing_zeros() as usize;
            let b = 63 - pair.leading_zeros() as usize;
            graphs[colex_rank(e & !pair)].add_edge(a, b);
        }
    }
    graphs
}

/// `G(H, A)` for a single base set.
pub fn g_undirected(h: &Hypergraph, base: u64) -> Result<UndirectedGraphOnRest, SymmetricError> {
    check_base(h.n, h.k, base)?;
    let mut g = UndirectedGraphOnRest::empty(h.n, base);
    for e in h.edges().filter(|e| e & base == base) {
        let pair = e & !base;
        g.add_edge(
            pair.trailing_zeros() as usize,
            63 - pair.leading_zeros() as usize,
        );
    }
    Ok(g)
}

/// Whether a restriction check stops at the first failing base set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FailureMode {
    #[default]
    FirstFailure,
    AllFailures,
}

/// Outcome of a restriction check over every `(k−1)`-set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictionReport {
    pub n: usize,
    pub k: usize,
    /// number of base sets `C(n, k−1)`
    pub checked: usize,
    /// failing base sets in colex order; at most one in first-failure mode
    pub failures: Vec<u64>,
}

impl RestrictionReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn collect_failures<F>(count: usize, k: usize, mode: FailureMode, ok: F) -> Vec<u64>
where
    F: Fn(usize) -> bool + Sync,
{
    match mode {
        FailureMode::FirstFailure => (0..count)
            .into_par_iter()
            .find_first(|&r| !ok(r))
            .map(|r| colex_unrank(r, k - 1))
            .into_iter()
            .collect(),
        FailureMode::AllFailures => (0..count)
            .into_par_iter()
            .filter(|&r| !ok(r))
            .map(|r| colex_unrank(r, k - 1))
            .collect(),
    }
}

/// Strong connectivity of every `G^d(φ, A)`.
pub fn check_directed(
    formula: &CnfFormula,
    k: usize,
    mode: FailureMode,
) -> Result<RestrictionReport, SymmetricError> {
    let graphs = directed_restriction_graphs(formula, k)?;
    let failures = collect_failures(graphs.len(), k, mode, |r| graphs[r].is_strongly_connected());
    Ok(RestrictionReport {
        n: formula.num_vars(),
        k,
        checked: graphs.len(),
        failures,
    })
}

/// `true` iff `φ ⊆ Ψ_{n,k}` is ucp-equivalent to `Ψ_{n,k}`, decided through
/// strong connectivity of the restriction digraphs.
pub fn is_ucp_equiv_to_psi_via_graphs(
    formula: &CnfFormula,
    k: usize,
) -> Result<bool, SymmetricError> {
    Ok(check_directed(formula, k, FailureMode::FirstFailure)?.passed())
}

/// Connectivity of every `G(H, A)`.
pub fn check_restrictions(h: &Hypergraph, mode: FailureMode) -> RestrictionReport {
    let graphs = undirected_restriction_graphs(h);
    let failures = collect_failures(graphs.len(), h.k, mode, |r| graphs[r].is_connected());
    RestrictionReport {
        n: h.n,
        k: h.k,
        checked: graphs.len(),
        failures,
    }
}

pub fn has_connected_restrictions(h: &Hypergraph) -> bool {
    check_restrictions(h, FailureMode::FirstFailure).passed()
}

/// Restriction check of `θ(H)`: the undirected test, and the directed test
/// on `θ(H)` as well when `force_directed` is set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThetaCheck {
    pub undirected: RestrictionReport,
    pub directed: Option<RestrictionReport>,
}

impl ThetaCheck {
    pub fn passed(&self) -> bool {
        self.undirected.passed() && self.directed.as_ref().is_none_or(|d| d.passed())
    }

    /// `false` when both checks ran and disagree.
    pub fn consistent(&self) -> bool {
        self.directed
            .as_ref()
            .is_none_or(|d| d.failures == self.undirected.failures)
    }
}

pub fn check_theta(h: &Hypergraph, mode: FailureMode, force_directed: bool) -> ThetaCheck {
    let undirected = check_restrictions(h, mode);
    let directed =
        force_directed.then(|| check_directed(&theta(h), h.k, mode).expect("θ(H) lies inside Ψ"));
    ThetaCheck {
        undirected,
        directed,
    }
}

#[derive(Debug, Error)]
pub enum HypergraphFileError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("no hyperedges and no size header")]
    Empty,
    #[error(transparent)]
    Invalid(#[from] SymmetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parses one hyperedge per line as 1-based vertex indices.
///
/// Lines starting with `#` are comments. A comment of the form
/// `# n=<n> k=<k>` fixes the parameters; otherwise `k` is the first edge size
/// minus one and `n` is `n_hint` or the largest vertex seen.
pub fn parse_hypergraph(
    text: &str,
    n_hint: Option<usize>,
) -> Result<Hypergraph, HypergraphFileError> {
    let mut header: (Option<usize>, Option<usize>) = (None, None);
    let mut edges: Vec<(usize, Vec<usize>)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if let Some(comment) = line.strip_prefix('#') {
            for token in comment.split_whitespace() {
                let parse = |v: &str| {
                    v.parse::<usize>().map_err(|_| HypergraphFileError::Syntax {
                        line: line_no,
                        message: format!("bad header value '{v}'"),
                    })
                };
                if let Some(v) = token.strip_prefix("n=") {
                    header.0 = Some(parse(v)?);
                } else if let Some(v) = token.strip_prefix("k=") {
                    header.1 = Some(parse(v)?);
                }
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let vertices = line
            .split_whitespace()
            .map(|t| match t.parse::<usize>() {
                Ok(v) if (1..=MAX_GROUND).contains(&v) => Ok(v),
                _ => Err(HypergraphFileError::Syntax {
                    line: line_no,
                    message: format!("bad vertex '{t}'"),
                }),
            })
            .collect::<Result<Vec<_>, _>>()?;
        edges.push((line_no, vertices));
    }
    let k = match (header.1, edges.first()) {
        (Some(k), _) => k,
        (None, Some((_, e))) => e.len().saturating_sub(1),
        (None, None) => return Err(HypergraphFileError::Empty),
    };
    let max_seen = edges
        .iter()
        .flat_map(|(_, e)| e.iter().copied())
        .max()
        .unwrap_or(0);
    let n = header.0.or(n_hint).unwrap_or(max_seen);
    let mut h = Hypergraph::new(n, k)?;
    for (line, vertices) in edges {
        let mask = subsets::from_members(vertices.iter().map(|v| v - 1));
        if size(mask) != vertices.len() {
            return Err(HypergraphFileError::Syntax {
                line,
                message: "repeated vertex".into(),
            });
        }
        h.insert(mask)?;
    }
    Ok(h)
}

pub fn read_hypergraph(
    path: &std::path::Path,
    n_hint: Option<usize>,
) -> Result<Hypergraph, HypergraphFileError> {
    parse_hypergraph(&std::fs::read_to_string(path)?, n_hint)
}

/// Writes the size header and one edge per line in colex order.
pub fn write_hypergraph(h: &Hypergraph) -> String {
    let mut out = format!("# n={} k={} edges={}\n", h.n, h.k, h.len());
    for e in h.edges() {
        writeln!(out, "{}", subsets::display_one_based(e)).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equivalence::{is_absorbed, is_ucp_irredundant, ucp_equivalent};

    fn c(values: &[i32]) -> Clause {
        Clause::from_dimacs(values).unwrap()
    }

    #[test]
    fn psi_sizes() {
        let p = psi(3, 1).unwrap();
        assert_eq!(p.size(), 6);
        for i in 1..=3 {
            for j in (1..=3).filter(|&j| j != i) {
                assert!(p.contains(&c(&[-i, j])));
            }
        }
        assert_eq!(psi(4, 2).unwrap().size(), 12);
        for n in 2..=9 {
            assert_eq!(psi(n, n - 1).unwrap().size(), n);
        }
        assert!(psi(3, 3).is_err());
        assert!(psi(3, 0).is_err());
    }

    #[test]
    fn symmetric_function() {
        assert!(!f_eval(4, 2, &[true, true, false, false]));
        assert!(f_eval(4, 2, &[false; 4]));
        assert!(f_eval(4, 2, &[true; 4]));
        assert!(f_eval(4, 2, &[false, true, false, false]));
    }

    #[test]
    fn theta_single_edge() {
        let h = Hypergraph::from_edges(3, 2, [0b111]).unwrap();
        let t = theta(&h);
        let expected =
            CnfFormula::from_dimacs_rows(3, &[&[-2, -3, 1], &[-1, -3, 2], &[-1, -2, 3]]).unwrap();
        assert_eq!(t, expected);
        assert!(theta(&Hypergraph::new(3, 2).unwrap()).is_empty());
    }

    #[test]
    fn theta_of_complete_is_psi() {
        for n in 2..=6 {
            for k in 1..n {
                assert_eq!(
                    theta(&Hypergraph::complete(n, k).unwrap()),
                    psi(n, k).unwrap()
                );
            }
        }
    }

    #[test]
    fn bad_edges_rejected() {
        let mut h = Hypergraph::new(4, 2).unwrap();
        assert!(h.insert(0b11).is_err());
        assert!(h.insert(0b1_0011).is_err());
        assert!(h.insert(0b1011).unwrap());
    }

    #[test]
    fn psi_digraphs_are_complete() {
        let (n, k) = (6, 3);
        let p = psi(n, k).unwrap();
        for g in directed_restriction_graphs(&p, k).unwrap() {
            let rest = g.rest();
            for i in members(rest) {
                assert_eq!(g.out_neighbours(i), rest & !(1 << i));
            }
        }
        let single = g_directed(&p, k, 0b11).unwrap();
        assert_eq!(single.arcs().len(), 4 * 3);
        assert!(g_directed(&CnfFormula::new(n), k, 0b11)
            .unwrap()
            .arcs()
            .is_empty());
        assert!(g_directed(&p, k, 0b111).is_err());
    }

    #[test]
    fn theta_digraphs_are_symmetric() {
        let h = Hypergraph::from_edges(6, 2, [0b000111, 0b011010, 0b110001]).unwrap();
        for g in directed_restriction_graphs(&theta(&h), 2).unwrap() {
            for (i, j) in g.arcs() {
                assert!(g.has_arc(j, i));
            }
        }
    }

    #[test]
    fn directed_and_single_graph_agree() {
        let h = Hypergraph::from_edges(6, 3, [0b001111, 0b011011, 0b110110, 0b111001]).unwrap();
        let t = theta(&h);
        for g in directed_restriction_graphs(&t, 3).unwrap() {
            assert_eq!(g, g_directed(&t, 3, g.base).unwrap());
        }
        for g in undirected_restriction_graphs(&h) {
            assert_eq!(g, g_undirected(&h, g.base).unwrap());
        }
    }

    #[test]
    fn not_in_psi_rejected() {
        let phi = CnfFormula::from_dimacs_rows(4, &[&[-1, 2]]).unwrap();
        assert!(matches!(
            directed_restriction_graphs(&phi, 2),
            Err(SymmetricError::NotInPsi(_))
        ));
    }

    #[test]
    fn restriction_examples() {
        for (n, k) in [(5, 2), (6, 3), (7, 3)] {
            assert!(has_connected_restrictions(&Hypergraph::star(n, k).unwrap()));
            assert!(has_connected_restrictions(
                &Hypergraph::complete(n, k).unwrap()
            ));
            assert!(!has_connected_restrictions(&Hypergraph::new(n, k).unwrap()));
            assert!(is_ucp_equiv_to_psi_via_graphs(&psi(n, k).unwrap(), k).unwrap());
            assert!(is_ucp_equiv_to_psi_via_graphs(&phi_ell(n, k).unwrap(), k).unwrap());
        }
    }

    #[test]
    fn star_restrictions_are_stars() {
        let h = Hypergraph::star(6, 3).unwrap();
        for g in undirected_restriction_graphs(&h) {
            let rest = g.rest();
            if g.base & 1 == 0 {
                assert_eq!(g.edges().len(), size(rest) - 1);
                assert!(g.edges().iter().all(|&(a, _)| a == 0));
            } else {
                assert_eq!(g.edges().len(), size(rest) * (size(rest) - 1) / 2);
            }
        }
    }

    #[test]
    fn failure_modes() {
        let mut h = Hypergraph::star(6, 3).unwrap();
        h.remove(0b001111);
        let first = check_restrictions(&h, FailureMode::FirstFailure);
        let all = check_restrictions(&h, FailureMode::AllFailures);
        assert_eq!(first.failures.len(), 1);
        assert!(!all.failures.is_empty());
        assert_eq!(first.failures[0], all.failures[0]);
        assert!(all
            .failures
            .windows(2)
            .all(|w| colex_rank(w[0]) < colex_rank(w[1])));
        let both = check_theta(&h, FailureMode::AllFailures, true);
        assert!(both.consistent());
        assert!(!both.passed());
    }

    #[test]
    fn mutation_breaks_equivalence() {
        let (n, k) = (6, 3);
        let mut h = Hypergraph::star(n, k).unwrap();
        let first = h.edges().next().unwrap();
        h.remove(first);
        let t = theta(&h);
        assert!(!is_ucp_equiv_to_psi_via_graphs(&t, k).unwrap());
        assert!(!ucp_equivalent(&t, &psi(n, k).unwrap()));
    }

    #[test]
    fn phi_ell_sizes_and_irredundancy() {
        assert_eq!(phi_ell(8, 4).unwrap().size(), 175);
        assert_eq!(phi_ell(3, 1).unwrap().size(), 4);
        for n in 2..=12 {
            for k in 1..n {
                assert_eq!(phi_ell(n, k).unwrap().size() as u64, phi_ell_size(n, k));
                assert_eq!(
                    psi(n, k).unwrap().size() as u64,
                    (n - k) as u64 * binomial(n as u64, k as u64)
                );
            }
        }
        let phi = phi_ell(6, 3).unwrap();
        assert!(is_ucp_irredundant(&phi));
        assert!(phi.clauses().all(|cl| !is_absorbed(cl, &phi.without(cl))));
        assert!(ucp_equivalent(&phi, &psi(6, 3).unwrap()));
    }

    #[test]
    fn hypergraph_file_roundtrip() {
        let h = Hypergraph::star(6, 2).unwrap();
        let text = write_hypergraph(&h);
        assert_eq!(parse_hypergraph(&text, None).unwrap(), h);
        let plain = "# a comment\n1 2 3\n\n2 3 5\n";
        let g = parse_hypergraph(plain, None).unwrap();
        assert_eq!((g.n(), g.k(), g.len()), (5, 2, 2));
        assert_eq!(parse_hypergraph(plain, Some(7)).unwrap().n(), 7);
        assert!(parse_hypergraph("1 2 3\n1 2\n", None).is_err());
        assert!(parse_hypergraph("1 1 3\n", None).is_err());
        assert!(parse_hypergraph("1 x 3\n", None).is_err());
        assert!(matches!(
            parse_hypergraph("# nothing\n", None),
            Err(HypergraphFileError::Empty)
        ));
    }
}

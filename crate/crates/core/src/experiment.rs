//! The separation experiment: `φ^ℓ` against a small `φ* = θ(H**)`.
//!
//! Both formulas are ucp-equivalent to `Ψ_{n,k}`. `φ^ℓ` is ucp-irredundant yet
//! has `(k+1)·C(n−1, k)` clauses, while `φ*` comes from the randomized builder
//! and is far smaller. Each row records both sizes, their ratio, the lower
//! bound `n·C(n−1, k, k−1)` on any formula ucp-equivalent to `Ψ_{n,k}`, and
//! the verification flags.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::builder::{build_connected_restrictions, BuilderError};
use crate::cnf::CnfFormula;
use crate::covering::{exact_cover_number, greedy_bound, EXACT_MAX_N};
use crate::equivalence::{is_ucp_irredundant, ucp_equivalent};
use crate::subsets::binomial;
use crate::symmetric::{
    is_ucp_equiv_to_psi_via_graphs, phi_ell, psi, theta, Hypergraph, SymmetricError,
};

/// Direct absorption checks run only up to this many variables.
pub const ABSORPTION_MAX_N: usize = 10;

pub const CSV_HEADER: &str = "n,k,phi_ell,phi_star,ratio,lower_bound,checks";

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("need n >= 6, got {0}")]
    SmallN(usize),
    #[error("k = floor({n}/2) + ({offset}) is outside 2..={max}")]
    BadK { n: usize, offset: i64, max: usize },
    #[error(transparent)]
    Builder(#[from] BuilderError),
    #[error(transparent)]
    Symmetric(#[from] SymmetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// `k = ⌊n/2⌋ + offset`, kept inside the builder's range `2..=n−2`.
pub fn k_for(n: usize, offset: i64) -> Result<usize, ExperimentError> {
    let k = (n / 2) as i64 + offset;
    if k < 2 || k > n as i64 - 2 {
        return Err(ExperimentError::BadK {
            n,
            offset,
            max: n.saturating_sub(2),
        });
    }
    Ok(k as usize)
}

/// Lower bound `n·C(n−1, k, k−1)` on the size of any formula ucp-equivalent
/// to `Ψ_{n,k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LowerBound {
    pub covering_number: u64,
    /// `true` when `covering_number` is the exact value, otherwise it is
    /// `⌈C(n−1, k−1)/k⌉`
    pub exact: bool,
    pub clauses: u64,
}

pub fn lower_bound(n: usize, k: usize) -> LowerBound {
    let (covering_number, exact) = if n - 1 <= EXACT_MAX_N {
        match exact_cover_number(n - 1, k, k - 1) {
            Ok(c) => (c, true),
            Err(_) => (trivial_cover_bound(n - 1, k - 1), false),
        }
    } else {
        (trivial_cover_bound(n - 1, k - 1), false)
    };
    LowerBound {
        covering_number,
        exact,
        clauses: n as u64 * covering_number,
    }
}

/// `⌈C(m, j)/(j+1)⌉ ≤ C(m, j+1, j)`.
fn trivial_cover_bound(m: usize, j: usize) -> u64 {
    binomial(m as u64, j as u64).div_ceil(j as u64 + 1)
}

/// Size checks on a candidate `φ*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsFlags {
    pub lower_bound: LowerBound,
    pub meets_lower_bound: bool,
    /// `|φ*| = (k+1)·|H|` when `φ*` was built from a hypergraph
    pub size_matches_hypergraph: Option<bool>,
}

impl BoundsFlags {
    pub fn passed(&self) -> bool {
        self.meets_lower_bound && self.size_matches_hypergraph != Some(false)
    }
}

pub fn verify_bounds_row(
    n: usize,
    k: usize,
    phi_star: &CnfFormula,
    hypergraph: Option<&Hypergraph>,
) -> BoundsFlags {
    let lb = lower_bound(n, k);
    BoundsFlags {
        lower_bound: lb,
        meets_lower_bound: phi_star.size() as u64 >= lb.clauses,
        size_matches_hypergraph: hypergraph.map(|h| phi_star.size() == (k + 1) * h.len()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RowChecks {
    pub phi_ell_irredundant: bool,
    pub phi_ell_equivalent: bool,
    pub phi_star_graphs: bool,
    /// direct absorption against `Ψ_{n,k}`, only for small `n`
    pub phi_star_absorption: Option<bool>,
    pub bounds: BoundsFlags,
}

impl RowChecks {
    pub fn failures(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.phi_ell_irredundant {
            out.push("ell-irredundant");
        }
        if !self.phi_ell_equivalent {
            out.push("ell-equivalent");
        }
        if !self.phi_star_graphs {
            out.push("star-graphs");
        }
        if self.phi_star_absorption == Some(false) {
            out.push("star-absorption");
        }
        if !self.bounds.meets_lower_bound {
            out.push("lower-bound");
        }
        if self.bounds.size_matches_hypergraph == Some(false) {
            out.push("star-size");
        }
        out
    }

    pub fn passed(&self) -> bool {
        self.failures().is_empty()
    }

    /// CSV cell: `pass`, or `fail:` followed by the failing checks.
    pub fn summary(&self) -> String {
        let failures = self.failures();
        if failures.is_empty() {
            "pass".into()
        } else {
            format!("fail:{}", failures.join("+"))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationRow {
    pub n: usize,
    pub k: usize,
    pub phi_ell: u64,
    pub phi_star: u64,
    pub ratio: f64,
    pub cover_size: usize,
    pub greedy_bound: u64,
    pub union_size: usize,
    pub bad_sets: usize,
    pub added: usize,
    pub checks: RowChecks,
    pub seconds: f64,
}

/// Outcome of one `n`: a row, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum RowOutcome {
    Row(SeparationRow),
    Failed { n: usize, error: String },
}

impl RowOutcome {
    pub fn n(&self) -> usize {
        match self {
            RowOutcome::Row(r) => r.n,
            RowOutcome::Failed { n, .. } => *n,
        }
    }

    pub fn passed(&self) -> bool {
        matches!(self, RowOutcome::Row(r) if r.checks.passed())
    }

    pub fn row(&self) -> Option<&SeparationRow> {
        match self {
            RowOutcome::Row(r) => Some(r),
            RowOutcome::Failed { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationConfig {
    pub n_list: Vec<usize>,
    pub k_offset: i64,
    pub s: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeparationTable {
    pub config: SeparationConfig,
    pub rows: Vec<RowOutcome>,
}

impl SeparationTable {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(RowOutcome::passed)
    }

    /// Ratios of the completed rows, in `n`-ascending order.
    pub fn ratios(&self) -> Vec<f64> {
        self.rows
            .iter()
            .filter_map(|r| r.row().map(|r| r.ratio))
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            match row {
                RowOutcome::Row(r) => writeln!(
                    out,
                    "{},{},{},{},{:.6},{},{}",
                    r.n,
                    r.k,
                    r.phi_ell,
                    r.phi_star,
                    r.ratio,
                    r.checks.bounds.lower_bound.clauses,
                    r.checks.summary()
                ),
                RowOutcome::Failed { n, .. } => writeln!(out, "{n},,,,,,error"),
            }
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> Result<String, ExperimentError> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes the CSV to `path` and the JSON sidecar next to it.
    pub fn write(&self, path: &Path) -> Result<(), ExperimentError> {
        std::fs::write(path, self.to_csv())?;
        std::fs::write(path.with_extension("json"), self.to_json()?)?;
        Ok(())
    }
}

/// One row of the experiment.
pub fn separation_row(
    n: usize,
    k: usize,
    s: usize,
    seed: u64,
) -> Result<SeparationRow, ExperimentError> {
    let start = Instant::now();
    let ell = phi_ell(n, k)?;
    let (h, report) = build_connected_restrictions(n, k, s, seed)?;
    let star = theta(&h);
    let phi_ell_irredundant = is_ucp_irredundant(&ell);
    let small = n <= ABSORPTION_MAX_N;
    let psi_nk = if small { Some(psi(n, k)?) } else { None };
    let phi_ell_equivalent = match &psi_nk {
        Some(p) => ucp_equivalent(&ell, p) && is_ucp_equiv_to_psi_via_graphs(&ell, k)?,
        None => is_ucp_equiv_to_psi_via_graphs(&ell, k)?,
    };
    let phi_star_graphs = is_ucp_equiv_to_psi_via_graphs(&star, k)?;
    let phi_star_absorption = psi_nk.as_ref().map(|p| ucp_equivalent(&star, p));
    let bounds = verify_bounds_row(n, k, &star, Some(&h));
    Ok(SeparationRow {
        n,
        k,
        phi_ell: ell.size() as u64,
        phi_star: star.size() as u64,
        ratio: ell.size() as f64 / star.size() as f64,
        cover_size: report.cover_size,
        greedy_bound: greedy_bound(n, k),
        union_size: report.union_size,
        bad_sets: report.t(),
        added: report.added().len(),
        checks: RowChecks {
            phi_ell_irredundant,
            phi_ell_equivalent,
            phi_star_graphs,
            phi_star_absorption,
            bounds,
        },
        seconds: start.elapsed().as_secs_f64(),
    })
}

/// Runs every `n` and returns rows in `n`-ascending order. A failing row is
/// recorded and the others still run.
pub fn run_separation(config: &SeparationConfig) -> SeparationTable {
    let mut n_list = config.n_list.clone();
    n_list.sort_unstable();
    n_list.dedup();
    let rows = n_list
        .par_iter()
        .map(|&n| {
            let outcome = if n < 6 {
                Err(ExperimentError::SmallN(n))
            } else {
                k_for(n, config.k_offset).and_then(|k| separation_row(n, k, config.s, config.seed))
            };
            outcome
                .map(RowOutcome::Row)
                .unwrap_or_else(|e| RowOutcome::Failed {
                    n,
                    error: e.to_string(),
                })
        })
        .collect();
    SeparationTable {
        config: SeparationConfig {
            n_list,
            ..config.clone()
        },
        rows,
    }
}

use std::fs::File;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ucp_lab::builder::{build_connected_restrictions, DEFAULT_S};
use ucp_lab::cnf::{emit_dimacs, read_dimacs, Clause, CnfFormula, PartialAssignment};
use ucp_lab::covering::{exact_cover, greedy_bound, greedy_cover, mu_of, write_blocks};
use ucp_lab::dual_rail::idr;
use ucp_lab::equivalence::{
    irredundant_core, is_absorbed, is_ucp_irredundant, primify, ucp_equivalent, RemovalOrder,
};
use ucp_lab::experiment::{run_separation, SeparationConfig};
use ucp_lab::subsets::display_one_based;
use ucp_lab::symmetric::{
    check_directed, check_theta, phi_ell, psi, read_hypergraph, write_hypergraph, FailureMode,
};
use ucp_lab::ucp::{ucp_with_assumptions, UcpOutcome};

#[derive(Parser)]
#[command(
    name = "ucp-lab",
    version,
    about = "Unit propagation, ucp-equivalence and the symmetric family Ψ(n,k)"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run unit propagation, optionally under assumptions
    Ucp {
        file: PathBuf,
        /// literals to assume, e.g. "-2 3"
        #[arg(long, allow_hyphen_values = true)]
        assume: Option<String>,
    },
    /// Exit 0 iff the clause is absorbed by the formula
    Absorbed {
        file: PathBuf,
        /// the clause as DIMACS literals, e.g. "-1 4"
        #[arg(long, allow_hyphen_values = true)]
        clause: String,
    },
    /// Exit 0 iff the two formulas are ucp-equivalent
    UcpEq { a: PathBuf, b: PathBuf },
    /// Exit 0 iff no clause is absorbed by the others
    Irredundant { file: PathBuf },
    /// Print a ucp-irredundant core; exit 0 iff the input was already irredundant
    Core {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = OrderArg::LongestFirst)]
        order: OrderArg,
        /// seed for --order shuffled
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Shrink every clause to a prime sub-implicate (input must be propagation complete)
    Primify {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit the dual-rail Horn encoding
    Idr {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate Ψ(n,k) or φ^ℓ
    Gen {
        #[arg(value_enum)]
        family: Family,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Restriction-graph checks
    #[command(subcommand)]
    Check(CheckCommand),
    /// Covering designs
    #[command(subcommand)]
    Cover(CoverCommand),
    /// Randomized hypergraph construction
    #[command(subcommand)]
    Build(BuildCommand),
    /// Reproducible experiments
    #[command(subcommand)]
    Experiment(ExperimentCommand),
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    LongestFirst,
    ShortestFirst,
    Canonical,
    ReverseCanonical,
    Shuffled,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Psi,
    PhiEll,
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Exit 0 iff every G(H,A) of the hypergraph is connected
    Restrictions {
        file: PathBuf,
        /// number of vertices when the file has no header
        #[arg(long)]
        n: Option<usize>,
        #[command(flatten)]
        mode: ModeArgs,
        /// also run the directed check on θ(H)
        #[arg(long)]
        force_directed: bool,
    },
    /// Exit 0 iff a formula inside Ψ(n,k) has strongly connected restriction digraphs
    Graphs {
        file: PathBuf,
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        mode: ModeArgs,
    },
}

#[derive(Args)]
struct ModeArgs {
    /// list every failing base set instead of the first
    #[arg(long)]
    all: bool,
}

impl ModeArgs {
    fn mode(&self) -> FailureMode {
        if self.all {
            FailureMode::AllFailures
        } else {
            FailureMode::FirstFailure
        }
    }
}

#[derive(Subcommand)]
enum CoverCommand {
    /// Greedy cover of all k-sets by (k+1)-sets
    Greedy {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact covering number C(n,r,k) with an optimal cover
    Exact {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: usize,
        #[arg(long)]
        k: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum BuildCommand {
    /// Union of s permuted greedy covers, repaired to connected restrictions
    Hstar {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum ExperimentCommand {
    /// Size of φ^ℓ against θ(H**) for each n
    Separation {
        #[arg(long, value_delimiter = ',', default_values_t = vec![8, 10, 12, 14])]
        n: Vec<usize>,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        k_offset: i64,
        #[arg(long, default_value_t = DEFAULT_S)]
        s: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(short, long, default_value = "results.csv")]
        output: PathBuf,
    },
}

fn read_formula(path: &Path) -> Result<CnfFormula> {
    let reader: Box<dyn Read> = if path == Path::new("-") {
        Box::new(io::stdin())
    } else {
        Box::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
    };
    read_dimacs(reader).with_context(|| format!("reading {}", path.display()))
}

fn parse_ints(text: &str) -> Result<Vec<i32>> {
    text.split_whitespace()
        .filter(|t| *t != "0")
        .map(|t| {
            t.parse::<i32>()
                .with_context(|| format!("bad literal '{t}'"))
        })
        .collect()
}

fn emit(output: Option<&Path>, text: &str) -> Result<()> {
    match output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => Ok(io::stdout().write_all(text.as_bytes())?),
    }
}

fn verdict(holds: bool) -> ExitCode {
    println!("{}", if holds { "yes" } else { "no" });
    if holds {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Ucp { file, assume } => {
            let phi = read_formula(&file)?;
            let alpha = match assume {
                Some(text) => PartialAssignment::from_dimacs(&parse_ints(&text)?)?,
                None => PartialAssignment::empty(),
            };
            match ucp_with_assumptions(&phi, &alpha) {
                UcpOutcome::Contradiction => println!("UNSAT-BY-UCP"),
                UcpOutcome::Consistent(lits) => {
                    let text: Vec<String> = lits.iter().map(|l| l.to_string()).collect();
                    println!("{}", text.join(" "));
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Absorbed { file, clause } => {
            let phi = read_formula(&file)?;
            let c = Clause::from_dimacs(&parse_ints(&clause)?)?;
            Ok(verdict(is_absorbed(&c, &phi)))
        }
        Command::UcpEq { a, b } => {
            let (a, b) = (read_formula(&a)?, read_formula(&b)?);
            let n = a.num_vars().max(b.num_vars());
            Ok(verdict(ucp_equivalent(
                &a.with_num_vars(n),
                &b.with_num_vars(n),
            )))
        }
        Command::Irredundant { file } => Ok(verdict(is_ucp_irredundant(&read_formula(&file)?))),
        Command::Core {
            file,
            order,
            seed,
            output,
        } => {
            let phi = read_formula(&file)?;
            let order = match order {
                OrderArg::LongestFirst => RemovalOrder::LongestFirst,
                OrderArg::ShortestFirst => RemovalOrder::ShortestFirst,
                OrderArg::Canonical => RemovalOrder::Canonical,
                OrderArg::ReverseCanonical => RemovalOrder::ReverseCanonical,
                OrderArg::Shuffled => RemovalOrder::Shuffled(seed),
            };
            let core = irredundant_core(&phi, &order)?;
            emit(output.as_deref(), &emit_dimacs(&core))?;
            eprintln!("kept {} of {} clauses", core.size(), phi.size());
            Ok(if core.size() == phi.size() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Primify { file, output } => {
            let prime = primify(&read_formula(&file)?)?;
            emit(output.as_deref(), &emit_dimacs(&prime))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Idr { file, output } => {
            let horn = idr(&read_formula(&file)?)?;
            emit(output.as_deref(), &emit_dimacs(horn.formula()))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Gen {
            family,
            n,
            k,
            output,
        } => {
            let phi = match family {
                Family::Psi => psi(n, k)?,
                Family::PhiEll => phi_ell(n, k)?,
            };
            emit(output.as_deref(), &emit_dimacs(&phi))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Check(CheckCommand::Restrictions {
            file,
            n,
            mode,
            force_directed,
        }) => {
            let h = read_hypergraph(&file, n)?;
            let check = check_theta(&h, mode.mode(), force_directed);
            if !check.consistent() {
                bail!("directed and undirected restriction checks disagree");
            }
            for a in &check.undirected.failures {
                println!("disconnected A = {{{}}}", display_one_based(*a));
            }
            println!(
                "checked {} base sets of size {}",
                check.undirected.checked,
                h.k() - 1
            );
            Ok(verdict(check.passed()))
        }
        Command::Check(CheckCommand::Graphs { file, k, mode }) => {
            let phi = read_formula(&file)?;
            let report = check_directed(&phi, k, mode.mode())?;
            for a in &report.failures {
                println!(
                    "not strongly connected at A = {{{}}}",
                    display_one_based(*a)
                );
            }
            Ok(verdict(report.passed()))
        }
        Command::Cover(CoverCommand::Greedy { n, k, output }) => {
            let cover = greedy_cover(n, k)?;
            emit(output.as_deref(), &write_blocks(&cover))?;
            let mu = mu_of(n, k, cover.len() as u64)?;
            eprintln!(
                "blocks {} (bound {}), mu {} ~ {:.4}",
                cover.len(),
                greedy_bound(n, k),
                mu.mu,
                mu.as_f64()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Cover(CoverCommand::Exact { n, r, k, output }) => {
            let cover = exact_cover(n, r, k)?;
            println!("C({n},{r},{k}) = {}", cover.len());
            if let Some(p) = output {
                emit(Some(&p), &write_blocks(&cover))?;
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Build(BuildCommand::Hstar {
            n,
            k,
            s,
            seed,
            output,
            report,
        }) => {
            let (h, rep) = build_connected_restrictions(n, k, s, seed)?;
            emit(output.as_deref(), &write_hypergraph(&h))?;
            let json = serde_json::to_string_pretty(&rep.to_json())?;
            match report {
                Some(p) => std::fs::write(&p, json + "\n")
                    .with_context(|| format!("writing {}", p.display()))?,
                None => eprintln!("{json}"),
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Experiment(ExperimentCommand::Separation {
            n,
            k_offset,
            s,
            seed,
            output,
        }) => {
            let table = run_separation(&SeparationConfig {
                n_list: n,
                k_offset,
                s,
                seed,
            });
            table.write(&output)?;
            print!("{}", table.to_csv());
            Ok(if table.passed() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

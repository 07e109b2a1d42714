use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use sprouts_core::movegen::children;
use sprouts_core::position::{canonize, start_position, Position};
use sprouts_core::solver::{Expander, Node, ProofDb, Solver, Status};
use sprouts_core::store::{build_basis, BasisDb};
use sprouts_core::trees::{count_distinct_cts, enumerate_rcts, grundy, StoreMode, TreeBuilder, TreeExpr};
use sprouts_core::{parse, render, Budget};

/// Misère Sprouts workbench.
#[derive(Parser)]
#[command(name = "sprouts", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a position and print its canonical form.
    Parse { position: String },
    /// Print the number of lives.
    Lives { position: String },
    /// Print the distinct canonical children, one per line.
    Moves { position: String },
    /// Count distinct canonical trees in the game tree.
    CtCount {
        #[command(flatten)]
        start: Start,
        /// Allow more than 5 spots.
        #[arg(long)]
        long_run: bool,
    },
    /// Print the reduced canonical tree id and its expansion.
    Rct {
        position: String,
        #[arg(long, env = "SPROUTS_BASIS", conflicts_with = "build")]
        basis: Option<PathBuf>,
        /// Compute in a fresh store instead of a basis.
        #[arg(long)]
        build: bool,
    },
    /// Print the normal-play Grundy value.
    Grundy { position: String },
    /// Count trees of bounded height.
    EnumRct {
        #[arg(long)]
        height: u32,
        #[arg(long)]
        canonical_only: bool,
        /// Also print every tree.
        #[arg(long)]
        list: bool,
        /// Allow height 5 in reduced mode.
        #[arg(long)]
        long_run: bool,
    },
    /// Build a basis from S_p and save it; prints `p rcts positions`.
    Basis {
        #[arg(long)]
        spots: usize,
        #[arg(long)]
        out: PathBuf,
        /// Allow more than 5 spots.
        #[arg(long)]
        long_run: bool,
    },
    /// Misère outcome of a position: W, L, or ? when the budget runs out.
    Solve {
        #[command(flatten)]
        start: SolveStart,
        #[arg(long, env = "SPROUTS_BASIS")]
        basis: PathBuf,
        #[arg(long)]
        budget_nodes: Option<u64>,
        #[arg(long)]
        budget_secs: Option<f64>,
        #[arg(long)]
        proof_out: Option<PathBuf>,
    },
    /// Keep only the nodes a proof needs.
    Prune {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, env = "SPROUTS_BASIS")]
        basis: PathBuf,
    },
    /// Check a proof against a basis.
    Verify {
        #[arg(long)]
        proof: PathBuf,
        #[arg(long, env = "SPROUTS_BASIS")]
        basis: PathBuf,
    },
    /// Start the steering service.
    Serve {
        #[arg(long, default_value_t = 8080)]
        port: u16,
        #[arg(long, env = "SPROUTS_BASIS")]
        basis: PathBuf,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct Start {
    #[arg(long)]
    spots: Option<usize>,
    #[arg(long)]
    pos: Option<String>,
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct SolveStart {
    #[arg(long)]
    spots: Option<usize>,
    #[arg(long)]
    pos: Option<String>,
    /// A node key such as `|0|2-0-W,3-1-L`; it is simplified against the basis.
    #[arg(long)]
    node: Option<String>,
}

struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

const EXIT_FAILURE: u8 = 1;
const EXIT_BUDGET: u8 = 3;

fn fail(kind: &'static str, message: impl ToString) -> Failure {
    Failure { kind, message: message.to_string(), code: EXIT_FAILURE }
}

fn budget_exhausted(message: impl ToString) -> Failure {
    Failure { kind: "budget", message: message.to_string(), code: EXIT_BUDGET }
}

fn position(text: &str) -> Result<Position, Failure> {
    parse(text).map_err(|e| fail("position", e))
}

fn start(s: &Start) -> Result<Position, Failure> {
    match (&s.spots, &s.pos) {
        (Some(p), _) => start_position(*p).map_err(|e| fail("spots", e)),
        (_, Some(text)) => position(text),
        _ => unreachable!("clap requires one"),
    }
}

fn load_basis(path: &Path) -> Result<BasisDb, Failure> {
    BasisDb::load(path).map_err(|e| fail("basis", format!("{}: {e}", path.display())))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Parse { position: text } => {
            let pos = position(&text)?;
            println!("{}", render(&canonize(&pos)).map_err(|e| fail("render", e))?);
        }
        Command::Lives { position: text } => println!("{}", position(&text)?.lives()),
        Command::Moves { position: text } => {
            for child in children(&position(&text)?) {
                println!("{}", render(&child).map_err(|e| fail("render", e))?);
            }
        }
        Command::CtCount { start: s, long_run } => {
            if s.spots.is_some_and(|p| p > 5) && !long_run {
                return Err(fail("long_run", "more than 5 spots needs --long-run"));
            }
            let n = count_distinct_cts(&start(&s)?, Budget::unlimited()).map_err(budget_exhausted)?;
            println!("{n}");
        }
        Command::Rct { position: text, basis, build } => {
            let pos = position(&text)?;
            let store = match (basis, build) {
                (Some(path), false) => load_basis(&path)?.store().clone(),
                _ => sprouts_core::TreeStore::new(StoreMode::Reduced),
            };
            let mut builder = TreeBuilder::with_store(store, Budget::unlimited());
            let id = builder.tree_of(&pos).map_err(budget_exhausted)?;
            println!("{id} {}", TreeExpr::of(builder.store(), id));
        }
        Command::Grundy { position: text } => {
            println!("{}", grundy(&position(&text)?, Budget::unlimited()).map_err(budget_exhausted)?);
        }
        Command::EnumRct { height, canonical_only, list, long_run } => {
            let mode = if canonical_only { StoreMode::CanonicalOnly } else { StoreMode::Reduced };
            if height > 5 || (height == 5 && (canonical_only || !long_run)) {
                return Err(fail("height", "height 5 needs --long-run and reduced mode; larger heights are out of reach"));
            }
            let (store, ids) = enumerate_rcts(height, mode, Budget::unlimited()).map_err(budget_exhausted)?;
            println!("{}", ids.len());
            if list {
                for id in ids {
                    println!("{id} {}", TreeExpr::of(&store, id));
                }
            }
        }
        Command::Basis { spots, out, long_run } => {
            if spots > 5 && !long_run {
                return Err(fail("long_run", "more than 5 spots needs --long-run"));
            }
            let t = Instant::now();
            let basis = build_basis(spots, Budget::unlimited()).map_err(budget_exhausted)?;
            basis.save(&out).map_err(|e| fail("io", e))?;
            eprintln!("built in {:.1?}, run {}", t.elapsed(), basis.run());
            println!("{spots} {} {}", basis.distinct_rcts(), basis.position_count());
        }
        Command::Solve { start: s, basis, budget_nodes, budget_secs, proof_out } => {
            let basis = Arc::new(load_basis(&basis)?);
            let root = match s.node {
                Some(key) => {
                    let raw = Node::from_key(&key).map_err(|e| fail("node", e))?;
                    if let Some(t) = raw.rcts().iter().find(|t| !basis.store().contains(**t)) {
                        return Err(fail("node", format!("tree {t} is not in the basis")));
                    }
                    Node::simplify(raw.lands().to_vec(), raw.parity(), raw.rcts().to_vec(), &basis)
                }
                None => Node::from_position(&start(&Start { spots: s.spots, pos: s.pos })?, &basis),
            };
            let mut budget = Budget::unlimited();
            budget.max_nodes = budget_nodes;
            if let Some(secs) = budget_secs {
                budget = budget.with_secs(secs);
            }
            let t = Instant::now();
            let mut solver = Solver::new(basis);
            let status = solver.solve(&root, &budget);
            eprintln!(
                "root {} explored {} stored {} in {:.1?}",
                root.key(),
                solver.stats().explored(),
                solver.memo_len(),
                t.elapsed()
            );
            if let Some(path) = proof_out {
                solver.proof(&root).save(&path).map_err(|e| fail("io", e))?;
            }
            println!("{status}");
            if status == Status::Unknown {
                return Err(budget_exhausted("search stopped before the root was resolved"));
            }
        }
        Command::Prune { proof, out, basis } => {
            let db = ProofDb::load(&proof).map_err(|e| fail("proof", format!("{}: {e}", proof.display())))?;
            let mut expander = Expander::new(Arc::new(load_basis(&basis)?));
            let pruned = db.prune(&mut expander).map_err(|e| fail("proof", e))?;
            pruned.save(&out).map_err(|e| fail("io", e))?;
            println!("{} {}", db.len(), pruned.len());
        }
        Command::Verify { proof, basis } => {
            let db = ProofDb::load(&proof).map_err(|e| fail("proof", format!("{}: {e}", proof.display())))?;
            let mut expander = Expander::new(Arc::new(load_basis(&basis)?));
            db.verify(&mut expander).map_err(|e| fail("verify", e))?;
            let outcome = db.outcome().expect("verified proofs have a root");
            println!("ok {outcome}");
        }
        Command::Serve { port, basis } => {
            let basis = Arc::new(load_basis(&basis)?);
            sprouts_explorer::serve(port, basis).map_err(|e| fail("serve", e))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}: {}", f.kind, f.message);
            ExitCode::from(f.code)
        }
    }
}

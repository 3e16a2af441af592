use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand};
use serde_json::json;

use snowplan::bench::{self, Approach, BenchConfig};
use snowplan::corpus::{self, Corpus};
use snowplan::driver::{self, DriverError, SolveOptions, SolverBackend};
use snowplan::encoder::{self, EncodingSpec};
use snowplan::level::Level;
use snowplan::oracle::{self, OracleLimits, OracleOutcome};
use snowplan::pddl::{self, PddlVariant};
use snowplan::sim::{self, Plan};

const OK: u8 = 0;
const UNSOLVED: u8 = 1;
const USAGE: u8 = 2;
const BACKEND: u8 = 3;

#[derive(Parser)]
#[command(name = "snowplan", version, about = "Ball-move-optimal planning for a snowman puzzle via SAT")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Find a plan with the fewest ball moves (fewest moves for `basic`).
    Solve {
        level: PathBuf,
        /// A `+` suffix (as in `reach-count+`) also turns on invariants.
        #[arg(long, short = 'e', default_value = "reach-count")]
        encoding: Approach,
        #[arg(long)]
        invariants: bool,
        #[arg(long = "min-T", alias = "min-t")]
        min_t: Option<usize>,
        #[arg(long = "max-T", alias = "max-t", default_value_t = 60)]
        max_t: usize,
        /// Per-horizon solver time limit in seconds.
        #[arg(long)]
        timeout: Option<f64>,
        /// External solver command; `{}` is replaced by the DIMACS path.
        /// Defaults to $SNOWPLAN_SOLVER, then the bundled solver.
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Replay a move string and check that it builds every snowman.
    Validate {
        level: PathBuf,
        plan: String,
        #[arg(long)]
        json: bool,
    },
    /// Exhaustive breadth-first search over ball moves.
    Oracle {
        level: PathBuf,
        #[arg(long, default_value_t = 20)]
        max_moves: usize,
        #[arg(long, default_value_t = 10_000_000)]
        node_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Write the CNF formula for one horizon in DIMACS format.
    Encode {
        level: PathBuf,
        #[arg(short = 'T', long = "horizon")]
        horizon: usize,
        #[arg(long, short = 'e', default_value = "reach-count")]
        encoding: Approach,
        #[arg(long)]
        invariants: bool,
        /// Output file; standard output when absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Emit `c <name> = <id>` lines for every variable.
        #[arg(long)]
        comments: bool,
    },
    /// Write PDDL domain and problem files.
    Pddl {
        level: PathBuf,
        /// basic, cheating, reachability or all; planner-qualified names
        /// such as basic-LAMA are accepted.
        #[arg(long, default_value = "all")]
        variant: String,
        #[arg(short, long, default_value = ".")]
        output: PathBuf,
    },
    /// Solve every `.lvl` file of a directory with several encodings.
    Bench {
        dir: PathBuf,
        #[arg(long, default_value = "basic,cheating,reach-order,reach-count,reach-count+")]
        encodings: String,
        /// Per-instance time limit in seconds.
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(long, default_value_t = 1)]
        workers: usize,
        #[arg(long = "max-T", alias = "max-t", default_value_t = 200)]
        max_t: usize,
        #[arg(long)]
        solver: Option<String>,
        #[arg(long)]
        json: bool,
    },
    /// Check the corpus manifest against the oracle.
    VerifyCorpus {
        /// Directory holding manifest.json.
        dir: Option<PathBuf>,
        #[arg(long, default_value_t = 10_000_000)]
        node_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Solve a DIMACS file with the bundled solver, printing
    /// SAT-competition output (exit 10 sat, 20 unsat, 0 unknown).
    Sat {
        file: PathBuf,
        #[arg(long)]
        timeout: Option<f64>,
    },
}

struct Failure(u8, String);

impl From<DriverError> for Failure {
    fn from(e: DriverError) -> Self {
        Failure(BACKEND, e.to_string())
    }
}

fn load_level(path: &Path) -> Result<Level, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure(USAGE, format!("{}: {e}", path.display())))?;
    text.parse().map_err(|e| Failure(USAGE, format!("{}: {e}", path.display())))
}

fn level_id(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "level".into())
}

fn backend(solver: Option<&str>) -> Result<SolverBackend, Failure> {
    match solver {
        Some(cmd) => Ok(SolverBackend::from_command(cmd)?),
        None => Ok(SolverBackend::from_env()?),
    }
}

fn seconds(s: f64) -> Result<Duration, Failure> {
    Duration::try_from_secs_f64(s).map_err(|_| Failure(USAGE, format!("invalid time limit {s}")))
}

fn plural(n: usize, word: &str) -> String {
    format!("{n} {word}{}", if n == 1 { "" } else { "s" })
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Cmd::Solve { level, encoding, invariants, min_t, max_t, timeout, solver, json } => {
            let invariants = invariants || encoding.invariants;
            let encoding = encoding.variant;
            let id = level_id(&level);
            let lvl = load_level(&level)?;
            let backend = backend(solver.as_deref())?;
            let opts = SolveOptions {
                min_horizon: min_t,
                max_horizon: max_t,
                invariants,
                call_timeout: timeout.map(seconds).transpose()?,
                total_timeout: None,
            };
            let mut report = match driver::solve(&lvl, encoding, &backend, opts) {
                Ok(r) => r,
                Err(DriverError::HorizonExhausted(max)) => {
                    if json {
                        println!("{}", json!({"level": id, "variant": encoding, "error": "horizon-exhausted", "max_horizon": max}));
                    } else {
                        println!("no plan within horizon {max}");
                    }
                    return Ok(UNSOLVED);
                }
                Err(e) => return Err(e.into()),
            };
            report.level = Some(id.clone());
            if json {
                println!("{}", serde_json::to_string(&report).expect("report serializes"));
            } else {
                println!("level: {id} ({}, {})", plural(lvl.valid_locations().len(), "location"), plural(lvl.snowmen(), "snowman"));
                println!("encoding: {encoding}{}, solver: {}", if invariants { " with invariants" } else { "" }, backend.describe());
                println!("lower bound: {}", report.lower_bound);
                for h in &report.horizons {
                    println!(
                        "  T={:<3} {:<7} {:>8} vars {:>9} clauses {:>8.3}s",
                        h.horizon,
                        serde_json::to_value(h.result).expect("serializes").as_str().unwrap_or_default(),
                        h.vars,
                        h.clauses,
                        h.seconds
                    );
                }
                match (&report.plan, report.valid) {
                    (Some(plan), _) => {
                        println!("plan: {plan}");
                        println!(
                            "{}, {}",
                            plural(report.ball_moves.unwrap_or(0), "ball move"),
                            plural(report.total_moves.unwrap_or(0), "move")
                        );
                        if report.certified_optimal {
                            println!("optimal: certified");
                        } else {
                            println!("valid, optimality unknown");
                        }
                    }
                    (None, Some(false)) => {
                        println!(
                            "plan at T={} is invalid: {}",
                            report.sat_horizon.unwrap_or(0),
                            report.invalid_reason.as_deref().unwrap_or("rejected by the simulator")
                        );
                    }
                    (None, _) => println!("no plan found (time limit)"),
                }
            }
            Ok(if report.plan.is_some() { OK } else { UNSOLVED })
        }

        Cmd::Validate { level, plan, json } => {
            let lvl = load_level(&level)?;
            let plan: Plan = plan.parse().map_err(|e: sim::ParsePlanError| Failure(USAGE, e.to_string()))?;
            let (code, message, valid) = match sim::apply_plan(&lvl, &plan) {
                Ok(end) if end.is_goal(lvl.snowmen()) => (OK, format!("valid, {}", plural(plan.ball_moves(), "ball move")), true),
                Ok(_) => (UNSOLVED, "invalid: the plan ends before every snowman is built".to_string(), false),
                Err(e) => (UNSOLVED, format!("invalid: {e}"), false),
            };
            if json {
                println!("{}", json!({"valid": valid, "ball_moves": plan.ball_moves(), "moves": plan.len(), "message": message}));
            } else {
                println!("{message}");
            }
            Ok(code)
        }

        Cmd::Oracle { level, max_moves, node_cap, json } => {
            let lvl = load_level(&level)?;
            let outcome = oracle::search(&lvl, OracleLimits { max_ball_moves: max_moves, node_cap });
            let (code, text, value) = match &outcome {
                OracleOutcome::Solved { ball_moves, plan, .. } => (
                    OK,
                    format!("optimum: {}\nplan: {plan}", plural(*ball_moves, "ball move")),
                    json!({"status": "solved", "ball_moves": ball_moves, "plan": plan.to_string()}),
                ),
                OracleOutcome::NoSolutionWithin(n) => (
                    UNSOLVED,
                    format!("no solution within {}", plural(*n, "ball move")),
                    json!({"status": "no-solution-within", "max_ball_moves": n}),
                ),
                OracleOutcome::Unsolvable => (UNSOLVED, "unsolvable".into(), json!({"status": "unsolvable"})),
                OracleOutcome::Unknown { explored } => (
                    UNSOLVED,
                    format!("unknown: node cap reached after {explored} states"),
                    json!({"status": "unknown", "explored": explored}),
                ),
            };
            println!("{}", if json { value.to_string() } else { text });
            Ok(code)
        }

        Cmd::Encode { level, horizon, encoding, invariants, output, comments } => {
            let lvl = load_level(&level)?;
            let spec = EncodingSpec::new(encoding.variant, horizon).with_invariants(invariants || encoding.invariants);
            let enc = encoder::encode(&lvl, spec);
            let text = enc.formula.to_dimacs(comments);
            match output {
                Some(path) => {
                    std::fs::write(&path, text).map_err(|e| Failure(BACKEND, format!("{}: {e}", path.display())))?;
                    eprintln!(
                        "wrote {}: {} vars, {} clauses",
                        path.display(),
                        enc.formula.var_count(),
                        enc.formula.clause_count()
                    );
                }
                None => print!("{text}"),
            }
            Ok(OK)
        }

        Cmd::Pddl { level, variant, output } => {
            let lvl = load_level(&level)?;
            let variants: Vec<PddlVariant> = if variant == "all" {
                PddlVariant::ALL.to_vec()
            } else {
                vec![variant.parse().map_err(|e: pddl::UnknownPddlVariant| Failure(USAGE, e.to_string()))?]
            };
            let id = level_id(&level);
            for v in variants {
                let (d, p) = pddl::write_files(&lvl, &id, v, &output)
                    .map_err(|e| Failure(BACKEND, format!("{}: {e}", output.display())))?;
                println!("{}\n{}", d.display(), p.display());
            }
            Ok(OK)
        }

        Cmd::Bench { dir, encodings, timeout, workers, max_t, solver, json } => {
            let approaches = bench::parse_approaches(&encodings).map_err(|e| Failure(USAGE, e.to_string()))?;
            let instances = bench::load_dir(&dir).map_err(|e| Failure(USAGE, e.to_string()))?;
            if instances.is_empty() {
                return Err(Failure(USAGE, format!("{}: no .lvl files", dir.display())));
            }
            let cfg = BenchConfig {
                approaches: approaches.clone(),
                timeout: seconds(timeout)?,
                workers,
                backend: backend(solver.as_deref())?,
                max_horizon: max_t,
            };
            let records = bench::run_bench(&instances, &cfg);
            if json {
                for r in &records {
                    println!("{}", serde_json::to_string(r).expect("record serializes"));
                }
                for s in bench::summarize(&records, &approaches, timeout) {
                    println!("{}", serde_json::to_string(&s).expect("summary serializes"));
                }
            } else {
                print!("{}", bench::render_table(&records, &approaches, timeout));
            }
            let failed = records.iter().any(|r| r.status == bench::BenchStatus::Error);
            Ok(if failed { BACKEND } else { OK })
        }

        Cmd::VerifyCorpus { dir, node_cap, json } => {
            let dir = dir.unwrap_or_else(Corpus::default_dir);
            let corpus = Corpus::load(&dir).map_err(|e| Failure(USAGE, e.to_string()))?;
            let checks = corpus::verify_corpus(&corpus, OracleLimits { node_cap, ..OracleLimits::default() });
            for c in &checks {
                if json {
                    println!("{}", serde_json::to_string(c).expect("check serializes"));
                } else {
                    println!("{:<18} {:?}", c.id, c.status);
                }
            }
            Ok(if checks.iter().any(|c| c.status.is_failure()) { UNSOLVED } else { OK })
        }

        Cmd::Sat { file, timeout } => {
            let text = std::fs::read_to_string(&file).map_err(|e| Failure(USAGE, format!("{}: {e}", file.display())))?;
            let formula = cdcl::parse_dimacs(&text).map_err(|e| Failure(USAGE, format!("{}: {e}", file.display())))?;
            let mut solver = cdcl::Solver::from_dimacs(&formula);
            if let Some(t) = timeout {
                solver.set_deadline(Some(std::time::Instant::now() + seconds(t)?));
            }
            let result = solver.solve();
            print!("{}", cdcl::competition_output(&result));
            Ok(match result {
                cdcl::SolveResult::Sat(_) => 10,
                cdcl::SolveResult::Unsat => 20,
                cdcl::SolveResult::Unknown => 0,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

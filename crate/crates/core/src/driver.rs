//! The planning-as-SAT horizon loop.
//!
//! [`solve`] encodes horizons `T = min, min+1, ...`, hands each formula to a
//! [`SolverBackend`], and stops at the first satisfiable one. The decoded plan
//! is replayed on the simulator before it is reported.

use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::cnf::{parse_model, Assignment, CnfFormula, ModelError, SolverAnswer};
use crate::encoder::{self, Decoded, EncodingSpec, Variant};
use crate::level::Level;
use crate::sim::{self, Plan};

/// Environment variable naming the default external solver command.
pub const SOLVER_ENV: &str = "SNOWPLAN_SOLVER";

/// Fewest ball moves any solution can have.
///
/// Every snowman needs two junctions (a ball resting on another), each
/// created by one push, and pushes never grow a ball because stacked cells
/// carry no snow. Every other move grows the total ball size by at most one.
pub fn lower_bound(level: &Level) -> usize {
    let k = level.snowmen();
    let junctions: usize = level.stacks().values().map(|s| s.len() - 1).sum();
    let weight: usize = level.stacks().values().map(|s| s.total_weight() as usize).sum();
    (2 * k).saturating_sub(junctions) + (6 * k).saturating_sub(weight)
}

/// How the DIMACS file reaches an external solver.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    /// A temp file whose path replaces `{}` in the arguments (appended when absent).
    File,
    Stdin,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverBackend {
    /// The bundled CDCL solver, run in-process.
    Bundled,
    External { program: String, args: Vec<String>, input: InputMode },
}

impl SolverBackend {
    /// Parses a whitespace-separated command line. A `{}` argument receives
    /// the DIMACS path; a trailing `-` argument (or `stdin:` prefix) selects
    /// standard input instead. The words `bundled` and `builtin` select the
    /// in-process solver.
    pub fn from_command(command: &str) -> Result<SolverBackend, DriverError> {
        let command = command.trim();
        if matches!(command, "" | "bundled" | "builtin") {
            return Ok(SolverBackend::Bundled);
        }
        let (stdin, rest) = match command.strip_prefix("stdin:") {
            Some(rest) => (true, rest),
            None => (false, command),
        };
        let mut words: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
        if words.is_empty() {
            return Err(DriverError::BackendFailure(format!("empty solver command {command:?}")));
        }
        let program = words.remove(0);
        let input = if stdin || words.last().is_some_and(|w| w == "-") {
            words.retain(|w| w != "-");
            InputMode::Stdin
        } else {
            InputMode::File
        };
        Ok(SolverBackend::External { program, args: words, input })
    }

    /// `SNOWPLAN_SOLVER` when set, the bundled solver otherwise.
    pub fn from_env() -> Result<SolverBackend, DriverError> {
        match std::env::var(SOLVER_ENV) {
            Ok(cmd) => SolverBackend::from_command(&cmd),
            Err(_) => Ok(SolverBackend::Bundled),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            SolverBackend::Bundled => "bundled cdcl".to_string(),
            SolverBackend::External { program, args, .. } => {
                std::iter::once(program.as_str()).chain(args.iter().map(String::as_str)).collect::<Vec<_>>().join(" ")
            }
        }
    }

    /// Solves one formula. `Unknown` means the time limit expired.
    pub fn run(&self, formula: &CnfFormula, limit: Option<Duration>) -> Result<SolverAnswer, DriverError> {
        match self {
            SolverBackend::Bundled => Ok(run_bundled(formula, limit)),
            SolverBackend::External { program, args, input } => run_external(formula, program, args, *input, limit),
        }
    }
}

fn run_bundled(formula: &CnfFormula, limit: Option<Duration>) -> SolverAnswer {
    let mut solver = cdcl::Solver::new();
    solver.reserve_vars(formula.var_count());
    let mut buf = Vec::new();
    for clause in formula.clauses() {
        buf.clear();
        buf.extend(clause.iter().map(|l| l.dimacs()));
        solver.add_clause(&buf);
    }
    solver.set_deadline(limit.map(|d| Instant::now() + d));
    match solver.solve() {
        cdcl::SolveResult::Sat(model) => SolverAnswer::Sat(Assignment::new(model)),
        cdcl::SolveResult::Unsat => SolverAnswer::Unsat,
        cdcl::SolveResult::Unknown => SolverAnswer::Unknown,
    }
}

fn run_external(
    formula: &CnfFormula,
    program: &str,
    args: &[String],
    input: InputMode,
    limit: Option<Duration>,
) -> Result<SolverAnswer, DriverError> {
    let dimacs = formula.to_dimacs(false);
    let mut cmd = Command::new(program);
    cmd.stdout(Stdio::piped()).stderr(Stdio::null());
    // Keeps the temp file alive until the solver exits.
    let _file = match input {
        InputMode::File => {
            let mut file = tempfile::Builder::new().prefix("snowplan-").suffix(".cnf").tempfile()?;
            file.write_all(dimacs.as_bytes())?;
            file.flush()?;
            let path = file.path().to_string_lossy().into_owned();
            let mut substituted = false;
            for a in args {
                if a.contains("{}") {
                    cmd.arg(a.replace("{}", &path));
                    substituted = true;
                } else {
                    cmd.arg(a);
                }
            }
            if !substituted {
                cmd.arg(&path);
            }
            cmd.stdin(Stdio::null());
            Some(file)
        }
        InputMode::Stdin => {
            cmd.args(args).stdin(Stdio::piped());
            None
        }
    };
    let mut child = cmd
        .spawn()
        .map_err(|e| DriverError::BackendFailure(format!("cannot start solver {program:?}: {e}")))?;
    let writer = child.stdin.take().map(|mut stdin| {
        std::thread::spawn(move || {
            // A solver may exit without reading everything; that is its call.
            let _ = stdin.write_all(dimacs.as_bytes());
        })
    });
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut out = String::new();
        stdout.read_to_string(&mut out).map(|_| out)
    });

    let deadline = limit.map(|d| Instant::now() + d);
    let timed_out = loop {
        if child.try_wait()?.is_some() {
            break false;
        }
        if deadline.is_some_and(|d| Instant::now() >= d) {
            let _ = child.kill();
            let _ = child.wait();
            break true;
        }
        std::thread::sleep(Duration::from_millis(5));
    };
    if let Some(w) = writer {
        let _ = w.join();
    }
    let output = reader
        .join()
        .map_err(|_| DriverError::BackendFailure("solver output reader panicked".into()))??;
    if timed_out {
        return Ok(SolverAnswer::Unknown);
    }
    // Only the status line counts; exit codes differ between solvers.
    if output.lines().any(|l| l.trim() == "s UNKNOWN" || l.trim() == "s INDETERMINATE") {
        return Ok(SolverAnswer::Unknown);
    }
    parse_model(&output, formula).map_err(|e: ModelError| DriverError::BackendFailure(e.to_string()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum HorizonResult {
    Sat,
    Unsat,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonRecord {
    pub horizon: usize,
    pub result: HorizonResult,
    pub vars: usize,
    pub clauses: usize,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub level: Option<String>,
    pub variant: Variant,
    pub invariants: bool,
    pub lower_bound: usize,
    pub min_horizon: usize,
    pub horizons: Vec<HorizonRecord>,
    /// First satisfiable horizon.
    pub sat_horizon: Option<usize>,
    /// Present when the decoded plan replays to a goal.
    #[serde(serialize_with = "plan_as_string")]
    pub plan: Option<Plan>,
    pub ball_moves: Option<usize>,
    pub total_moves: Option<usize>,
    /// Whether the decoded plan passed the simulator. Only `cheating` can
    /// produce `false`.
    pub valid: Option<bool>,
    pub invalid_reason: Option<String>,
    /// Every horizon from the lower bound up to the satisfiable one was
    /// proven unsatisfiable and the plan is valid.
    pub certified_optimal: bool,
    pub seconds: f64,
}

fn plan_as_string<S: serde::Serializer>(plan: &Option<Plan>, s: S) -> Result<S::Ok, S::Error> {
    match plan {
        Some(p) => s.serialize_some(&p.to_string()),
        None => s.serialize_none(),
    }
}

impl SolveReport {
    pub fn solved(&self) -> bool {
        self.plan.is_some()
    }

    pub fn timed_out(&self) -> bool {
        self.horizons.iter().any(|h| h.result == HorizonResult::Timeout)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SolveOptions {
    /// Defaults to [`lower_bound`] for ball-move variants and 0 for `basic`.
    pub min_horizon: Option<usize>,
    pub max_horizon: usize,
    pub invariants: bool,
    /// Per-horizon solver time limit.
    pub call_timeout: Option<Duration>,
    /// Budget for the whole loop; horizons stop being tried once it runs out.
    pub total_timeout: Option<Duration>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { min_horizon: None, max_horizon: 60, invariants: false, call_timeout: None, total_timeout: None }
    }
}

#[derive(Debug, Error)]
pub enum DriverError {
    #[error("solver backend failure: {0}")]
    BackendFailure(String),
    #[error("horizon {horizon}: decoded plan rejected: {reason}")]
    ValidationFailure { horizon: usize, reason: String },
    #[error("no plan with at most {0} steps")]
    HorizonExhausted(usize),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn solve(level: &Level, variant: Variant, backend: &SolverBackend, opts: SolveOptions) -> Result<SolveReport, DriverError> {
    let started = Instant::now();
    let lower_bound = lower_bound(level);
    let min_horizon = opts.min_horizon.unwrap_or(if variant.counts_ball_moves() { lower_bound } else { 0 });
    let mut report = SolveReport {
        level: None,
        variant,
        invariants: opts.invariants,
        lower_bound,
        min_horizon,
        horizons: Vec::new(),
        sat_horizon: None,
        plan: None,
        ball_moves: None,
        total_moves: None,
        valid: None,
        invalid_reason: None,
        certified_optimal: false,
        seconds: 0.0,
    };
    let total_deadline = opts.total_timeout.map(|d| started + d);

    for horizon in min_horizon..=opts.max_horizon {
        let mut limit = opts.call_timeout;
        if let Some(deadline) = total_deadline {
            let left = deadline.saturating_duration_since(Instant::now());
            if left.is_zero() {
                break;
            }
            limit = Some(limit.map_or(left, |l| l.min(left)));
        }
        let t0 = Instant::now();
        let spec = EncodingSpec::new(variant, horizon).with_invariants(opts.invariants);
        let encoding = encoder::encode(level, spec);
        let answer = backend.run(&encoding.formula, limit)?;
        let mut record = HorizonRecord {
            horizon,
            result: HorizonResult::Timeout,
            vars: encoding.formula.var_count(),
            clauses: encoding.formula.clause_count(),
            seconds: 0.0,
        };
        let model = match answer {
            SolverAnswer::Sat(model) => model,
            SolverAnswer::Unsat | SolverAnswer::Unknown => {
                if answer == SolverAnswer::Unsat {
                    record.result = HorizonResult::Unsat;
                }
                record.seconds = t0.elapsed().as_secs_f64();
                report.horizons.push(record);
                continue;
            }
        };
        record.result = HorizonResult::Sat;
        record.seconds = t0.elapsed().as_secs_f64();
        report.horizons.push(record);
        report.sat_horizon = Some(horizon);

        if let Some(i) = encoding.formula.first_violated(&model) {
            return Err(DriverError::BackendFailure(format!("model violates clause {i}")));
        }
        let decoded = encoder::decode(&encoding, &model, level)
            .map_err(|e| DriverError::ValidationFailure { horizon, reason: e.to_string() })?;
        let checked = match &decoded {
            Decoded::Moves(plan) => check_plan(level, plan, None),
            Decoded::BallActions { plan: Ok(plan), .. } => check_plan(level, plan, Some(horizon)),
            Decoded::BallActions { plan: Err(e), .. } => Err(e.to_string()),
        };
        match checked {
            Ok(()) => {
                let plan = decoded.plan().expect("checked plans exist").clone();
                report.valid = Some(true);
                report.ball_moves = Some(plan.ball_moves());
                report.total_moves = Some(plan.len());
                report.plan = Some(plan);
                // A total-move horizon is never below the ball-move bound either.
                let all_lower_unsat = report.horizons.iter().all(|h| h.result != HorizonResult::Timeout);
                report.certified_optimal = min_horizon <= lower_bound && all_lower_unsat;
            }
            Err(reason) if variant == Variant::Cheating => {
                report.valid = Some(false);
                report.invalid_reason = Some(reason);
            }
            Err(reason) => return Err(DriverError::ValidationFailure { horizon, reason }),
        }
        report.seconds = started.elapsed().as_secs_f64();
        return Ok(report);
    }
    report.seconds = started.elapsed().as_secs_f64();
    if report.timed_out() || total_deadline.is_some_and(|d| Instant::now() >= d) {
        Ok(report)
    } else {
        Err(DriverError::HorizonExhausted(opts.max_horizon))
    }
}

fn check_plan(level: &Level, plan: &Plan, ball_moves: Option<usize>) -> Result<(), String> {
    let end = sim::apply_plan(level, plan).map_err(|e| e.to_string())?;
    if !end.is_goal(level.snowmen()) {
        return Err(format!("plan {plan} does not reach the goal"));
    }
    if let Some(n) = ball_moves {
        if plan.ball_moves() != n {
            return Err(format!("plan {plan} has {} ball moves, horizon is {n}", plan.ball_moves()));
        }
    }
    Ok(())
}

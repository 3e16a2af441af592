//! Benchmark harness: every (instance, approach) pair is solved under a
//! timeout, and approaches are compared by PAR-2 score.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::driver::{self, SolveOptions, SolverBackend};
use crate::encoder::{UnknownVariant, Variant};
use crate::level::Level;

/// An encoding plus the invariant flag, written `reach-count+` when the
/// invariant clauses are on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Approach {
    pub variant: Variant,
    pub invariants: bool,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.variant, if self.invariants { "+" } else { "" })
    }
}

impl FromStr for Approach {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Approach, UnknownVariant> {
        let s = s.trim();
        let (name, invariants) = match s.strip_suffix('+') {
            Some(rest) => (rest, true),
            None => (s, false),
        };
        Ok(Approach { variant: name.parse()?, invariants })
    }
}

/// Parses a comma-separated approach list.
pub fn parse_approaches(list: &str) -> Result<Vec<Approach>, UnknownVariant> {
    list.split(',').filter(|s| !s.trim().is_empty()).map(str::parse).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BenchStatus {
    Solved,
    Timeout,
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub approach: String,
    pub status: BenchStatus,
    pub seconds: f64,
    /// First satisfiable horizon.
    pub horizon: Option<usize>,
    pub ball_moves: Option<usize>,
    /// Whether the plan passed the simulator; `false` only happens for
    /// `cheating`.
    pub valid: Option<bool>,
    pub certified_optimal: bool,
    pub error: Option<String>,
}

/// Sum of solved runtimes plus twice the timeout for every unsolved record.
pub fn par2(records: &[BenchRecord], timeout_secs: f64) -> f64 {
    records
        .iter()
        .map(|r| if r.status == BenchStatus::Solved { r.seconds } else { 2.0 * timeout_secs })
        .sum()
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub approaches: Vec<Approach>,
    pub timeout: Duration,
    pub workers: usize,
    pub backend: SolverBackend,
    pub max_horizon: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            approaches: vec![
                Approach { variant: Variant::Basic, invariants: false },
                Approach { variant: Variant::Cheating, invariants: false },
                Approach { variant: Variant::ReachOrder, invariants: false },
                Approach { variant: Variant::ReachCount, invariants: false },
                Approach { variant: Variant::ReachCount, invariants: true },
            ],
            timeout: Duration::from_secs(60),
            workers: 1,
            backend: SolverBackend::Bundled,
            max_horizon: 200,
        }
    }
}

pub fn run_one(name: &str, level: &Level, approach: Approach, cfg: &BenchConfig) -> BenchRecord {
    let started = Instant::now();
    let opts = SolveOptions {
        invariants: approach.invariants,
        max_horizon: cfg.max_horizon,
        total_timeout: Some(cfg.timeout),
        ..SolveOptions::default()
    };
    let result = driver::solve(level, approach.variant, &cfg.backend, opts);
    let seconds = started.elapsed().as_secs_f64();
    let mut record = BenchRecord {
        instance: name.to_string(),
        approach: approach.to_string(),
        status: BenchStatus::Error,
        seconds,
        horizon: None,
        ball_moves: None,
        valid: None,
        certified_optimal: false,
        error: None,
    };
    match result {
        Ok(report) if report.sat_horizon.is_some() && seconds <= cfg.timeout.as_secs_f64() => {
            record.status = BenchStatus::Solved;
            record.valid = report.valid;
            record.certified_optimal = report.certified_optimal;
            record.horizon = report.sat_horizon;
            record.ball_moves = report.ball_moves;
        }
        Ok(_) => record.status = BenchStatus::Timeout,
        Err(e) => record.error = Some(e.to_string()),
    }
    record
}

/// Runs every instance under every approach on `cfg.workers` threads.
/// Records come back ordered by instance, then approach.
pub fn run_bench(instances: &[(String, Level)], cfg: &BenchConfig) -> Vec<BenchRecord> {
    let jobs: Vec<(usize, usize)> =
        (0..instances.len()).flat_map(|i| (0..cfg.approaches.len()).map(move |a| (i, a))).collect();
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<(usize, BenchRecord)>> = Mutex::new(Vec::with_capacity(jobs.len()));
    std::thread::scope(|scope| {
        for _ in 0..cfg.workers.max(1) {
            scope.spawn(|| loop {
                let j = next.fetch_add(1, Ordering::Relaxed);
                let Some(&(i, a)) = jobs.get(j) else { break };
                let (name, level) = &instances[i];
                let record = run_one(name, level, cfg.approaches[a], cfg);
                results.lock().expect("no worker panics while holding the lock").push((j, record));
            });
        }
    });
    let mut results = results.into_inner().expect("workers finished");
    results.sort_by_key(|(j, _)| *j);
    results.into_iter().map(|(_, r)| r).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachSummary {
    pub approach: String,
    pub solved: usize,
    /// Solved with a simulator-valid plan.
    pub valid: usize,
    pub instances: usize,
    pub par2: f64,
}

pub fn summarize(records: &[BenchRecord], approaches: &[Approach], timeout_secs: f64) -> Vec<ApproachSummary> {
    approaches
        .iter()
        .map(|a| {
            let name = a.to_string();
            let mine: Vec<BenchRecord> = records.iter().filter(|r| r.approach == name).cloned().collect();
            let solved = mine.iter().filter(|r| r.status == BenchStatus::Solved);
            ApproachSummary {
                solved: solved.clone().count(),
                valid: solved.filter(|r| r.valid == Some(true)).count(),
                instances: mine.len(),
                par2: par2(&mine, timeout_secs),
                approach: name,
            }
        })
        .collect()
}

/// Per-instance table (ball moves and seconds per approach) followed by the
/// solved count and PAR-2 per approach. Solved counts show valid plans in
/// parentheses when some plan was invalid.
pub fn render_table(records: &[BenchRecord], approaches: &[Approach], timeout_secs: f64) -> String {
    let names: Vec<String> = approaches.iter().map(Approach::to_string).collect();
    let mut instances: Vec<&str> = Vec::new();
    for r in records {
        if !instances.contains(&r.instance.as_str()) {
            instances.push(&r.instance);
        }
    }
    let width = instances.iter().map(|s| s.len()).chain(["instance".len(), "PAR-2".len()]).max().unwrap_or(8);
    let col = names.iter().map(|n| n.len()).max().unwrap_or(0).max(14);
    let mut out = String::new();
    let _ = write!(out, "{:width$}", "instance");
    for n in &names {
        let _ = write!(out, "  {n:>col$}");
    }
    out.push('\n');
    for inst in &instances {
        let _ = write!(out, "{inst:width$}");
        for n in &names {
            let cell = match records.iter().find(|r| r.instance == *inst && &r.approach == n) {
                None => "-".to_string(),
                Some(r) => match r.status {
                    BenchStatus::Solved => {
                        let mark = if r.valid == Some(false) { "!" } else if r.certified_optimal { "" } else { "?" };
                        format!("{}{mark} {:.2}s", r.ball_moves.map_or("-".into(), |m| m.to_string()), r.seconds)
                    }
                    BenchStatus::Timeout => "timeout".to_string(),
                    BenchStatus::Error => "error".to_string(),
                },
            };
            let _ = write!(out, "  {cell:>col$}");
        }
        out.push('\n');
    }
    let summary = summarize(records, approaches, timeout_secs);
    let _ = write!(out, "{:width$}", "solved");
    for s in &summary {
        let cell = if s.valid < s.solved { format!("{}({})", s.solved, s.valid) } else { s.solved.to_string() };
        let _ = write!(out, "  {cell:>col$}");
    }
    out.push('\n');
    let _ = write!(out, "{:width$}", "PAR-2");
    for s in &summary {
        let _ = write!(out, "  {:>col$}", format!("{:.1}", s.par2));
    }
    out.push('\n');
    out
}

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Level { path: String, source: crate::level::LevelError },
}

/// Loads every `.lvl` file of a directory, sorted by file name.
pub fn load_dir(dir: &std::path::Path) -> Result<Vec<(String, Level)>, BenchError> {
    let io = |source| BenchError::Io { path: dir.display().to_string(), source };
    let mut paths: Vec<_> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "lvl"))
        .collect();
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let path = p.display().to_string();
            let text = std::fs::read_to_string(&p).map_err(|source| BenchError::Io { path: path.clone(), source })?;
            let level = text.parse::<Level>().map_err(|source| BenchError::Level { path, source })?;
            let name = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            Ok((name, level))
        })
        .collect()
}

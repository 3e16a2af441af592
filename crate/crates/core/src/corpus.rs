//! The shipped level corpus and its manifest, plus a random level generator.

use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::level::{parse_level, Level, LevelError};
use crate::oracle::{self, OracleLimits, OracleOutcome};
use crate::sim::{self, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Transcribed by hand from a published picture.
    FigureTranscription,
    Crafted,
    /// Produced by [`random_solvable_level`].
    Generated,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub id: String,
    /// Path relative to the manifest directory.
    pub file: String,
    pub expected_ball_moves: Option<usize>,
    pub provenance: Provenance,
    /// Too large for the oracle; the expected value comes from SAT runs.
    #[serde(default)]
    pub sat_certified_only: bool,
    /// A known solution that must replay to a goal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_plan: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("{id}: {source}")]
    Level { id: String, source: LevelError },
}

#[derive(Debug, Clone)]
pub struct Corpus {
    pub dir: PathBuf,
    pub entries: Vec<CorpusEntry>,
}

impl Corpus {
    /// The `corpus/` directory at the workspace root.
    pub fn default_dir() -> PathBuf {
        Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
    }

    pub fn load(dir: &Path) -> Result<Corpus, CorpusError> {
        let path = dir.join("manifest.json");
        let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io { path: path.clone(), source })?;
        let entries = serde_json::from_str(&text).map_err(|source| CorpusError::Manifest { path, source })?;
        Ok(Corpus { dir: dir.to_path_buf(), entries })
    }

    pub fn load_default() -> Result<Corpus, CorpusError> {
        Corpus::load(&Corpus::default_dir())
    }

    pub fn entry(&self, id: &str) -> Option<&CorpusEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn level(&self, entry: &CorpusEntry) -> Result<Level, CorpusError> {
        let path = self.dir.join(&entry.file);
        let text = std::fs::read_to_string(&path).map_err(|source| CorpusError::Io { path, source })?;
        parse_level(&text).map_err(|source| CorpusError::Level { id: entry.id.clone(), source })
    }

    /// Every entry with its parsed level.
    pub fn levels(&self) -> Result<Vec<(CorpusEntry, Level)>, CorpusError> {
        self.entries.iter().map(|e| Ok((e.clone(), self.level(e)?))).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum EntryStatus {
    Pass { ball_moves: Option<usize> },
    Mismatch { expected: Option<usize>, found: Option<usize> },
    /// Skipped by the oracle; the reference plan (if any) still replayed.
    SatCertifiedOnly,
    /// The oracle hit its node cap.
    Unknown,
    ReferencePlanFailed { reason: String },
    Error { reason: String },
}

impl EntryStatus {
    pub fn is_failure(&self) -> bool {
        matches!(self, EntryStatus::Mismatch { .. } | EntryStatus::ReferencePlanFailed { .. } | EntryStatus::Error { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryCheck {
    pub id: String,
    #[serde(flatten)]
    pub status: EntryStatus,
}

/// Parses every entry, replays reference plans, and compares expected
/// optima with the oracle.
pub fn verify_corpus(corpus: &Corpus, limits: OracleLimits) -> Vec<EntryCheck> {
    corpus
        .entries
        .iter()
        .map(|entry| EntryCheck { id: entry.id.clone(), status: verify_entry(corpus, entry, limits) })
        .collect()
}

fn verify_entry(corpus: &Corpus, entry: &CorpusEntry, limits: OracleLimits) -> EntryStatus {
    let level = match corpus.level(entry) {
        Ok(l) => l,
        Err(e) => return EntryStatus::Error { reason: e.to_string() },
    };
    if let Some(text) = &entry.reference_plan {
        if let Err(reason) = check_reference(&level, text, entry.expected_ball_moves) {
            return EntryStatus::ReferencePlanFailed { reason };
        }
    }
    if entry.sat_certified_only {
        return EntryStatus::SatCertifiedOnly;
    }
    match oracle::search(&level, limits) {
        OracleOutcome::Unknown { .. } => EntryStatus::Unknown,
        outcome => {
            let found = outcome.ball_moves();
            if found == entry.expected_ball_moves {
                EntryStatus::Pass { ball_moves: found }
            } else {
                EntryStatus::Mismatch { expected: entry.expected_ball_moves, found }
            }
        }
    }
}

fn check_reference(level: &Level, text: &str, expected: Option<usize>) -> Result<(), String> {
    let plan: Plan = text.parse().map_err(|e: sim::ParsePlanError| e.to_string())?;
    let end = sim::apply_plan(level, &plan).map_err(|e| e.to_string())?;
    if !end.is_goal(level.snowmen()) {
        return Err("reference plan does not reach the goal".into());
    }
    if expected.is_some_and(|n| n != plan.ball_moves()) {
        return Err(format!("reference plan has {} ball moves", plan.ball_moves()));
    }
    Ok(())
}

/// Shape of generated levels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    /// Interior size bounds (the wall border is added around it).
    pub min_width: usize,
    pub max_width: usize,
    pub min_height: usize,
    pub max_height: usize,
    pub snowmen: usize,
    /// Percent of interior cells turned into walls.
    pub wall_percent: u32,
    /// Percent of remaining floor cells covered in snow.
    pub snow_percent: u32,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            min_width: 3,
            max_width: 5,
            min_height: 3,
            max_height: 4,
            snowmen: 1,
            wall_percent: 8,
            snow_percent: 30,
        }
    }
}

/// Ball groups placed per snowman, on distinct cells.
const BALL_MIXES: [&[char]; 8] = [
    &['1', '2', '3'],
    &['1', '2', '3'],
    &['1', '1', '3'],
    &['1', '2', '2'],
    &['1', '1', '1'],
    &['6', '1'],
    &['4', '3'],
    &['5', '2'],
];

/// A random closed level. Not necessarily solvable.
pub fn random_level<R: Rng + ?Sized>(rng: &mut R, params: &GenParams) -> Level {
    loop {
        let w = rng.gen_range(params.min_width..=params.max_width);
        let h = rng.gen_range(params.min_height..=params.max_height);
        let mut grid = vec![vec!['#'; w + 2]; h + 2];
        let mut floor = Vec::new();
        for (r, row) in grid.iter_mut().enumerate().skip(1).take(h) {
            for (c, cell) in row.iter_mut().enumerate().skip(1).take(w) {
                if rng.gen_ratio(params.wall_percent, 100) {
                    continue;
                }
                *cell = if rng.gen_ratio(params.snow_percent, 100) { '\'' } else { '.' };
                floor.push((r, c));
            }
        }
        if floor.len() < 3 * params.snowmen + 1 {
            continue;
        }
        floor.shuffle(rng);
        let mut used = 0;
        for _ in 0..params.snowmen {
            for &piece in *BALL_MIXES.choose(rng).expect("non-empty") {
                let (r, c) = floor[used];
                grid[r][c] = piece;
                used += 1;
            }
        }
        let (r, c) = floor[used];
        grid[r][c] = if grid[r][c] == '\'' { 'P' } else { 'p' };
        let text: Vec<String> = grid.iter().map(|row| row.iter().collect()).collect();
        if let Ok(level) = parse_level(&text.join("\n")) {
            return level;
        }
    }
}

/// Draws levels until the oracle solves one within `max_ball_moves`.
pub fn random_solvable_level<R: Rng + ?Sized>(rng: &mut R, params: &GenParams, max_ball_moves: usize) -> (Level, usize) {
    loop {
        let level = random_level(rng, params);
        if let Some(n) = oracle::solve_optimal(&level, max_ball_moves).ball_moves() {
            return (level, n);
        }
    }
}

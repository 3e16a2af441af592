//! Executable game rules. Every plan produced anywhere in the crate is
//! checked against [`step`] before it is reported.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::level::{BallSize, Direction, Level, Location, SizeSet};

/// Dynamic part of the game: snow, balls and the character.
///
/// Per-cell data is stored densely over the full grid (walls included) so a
/// state can be indexed by [`Level::offset`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct State {
    width: usize,
    snow: Vec<bool>,
    balls: Vec<SizeSet>,
    character: Location,
}

impl State {
    pub fn initial(level: &Level) -> State {
        let cells = level.width() * level.height();
        let mut snow = vec![false; cells];
        let mut balls = vec![SizeSet::EMPTY; cells];
        for &loc in level.valid_locations() {
            snow[level.offset(loc)] = level.has_initial_snow(loc);
        }
        for (&loc, &set) in level.stacks() {
            balls[level.offset(loc)] = set;
        }
        State { width: level.width(), snow, balls, character: level.character() }
    }

    /// Builds an arbitrary state on `level`'s grid. Used by tests and generators;
    /// call [`State::check_invariants`] when the input is not trusted.
    pub fn from_parts(
        level: &Level,
        snow: impl IntoIterator<Item = Location>,
        stacks: &BTreeMap<Location, SizeSet>,
        character: Location,
    ) -> State {
        let cells = level.width() * level.height();
        let mut state = State {
            width: level.width(),
            snow: vec![false; cells],
            balls: vec![SizeSet::EMPTY; cells],
            character,
        };
        for loc in snow {
            state.snow[level.offset(loc)] = true;
        }
        for (&loc, &set) in stacks {
            state.balls[level.offset(loc)] = set;
        }
        state
    }

    fn at(&self, loc: Location) -> usize {
        loc.row * self.width + loc.col
    }

    pub fn character(&self) -> Location {
        self.character
    }

    /// Same balls and snow, character moved to `loc` (no path check).
    pub fn with_character(&self, loc: Location) -> State {
        State { character: loc, ..self.clone() }
    }

    pub fn has_snow(&self, loc: Location) -> bool {
        self.snow[self.at(loc)]
    }

    pub fn balls_at(&self, loc: Location) -> SizeSet {
        self.balls[self.at(loc)]
    }

    pub fn snow_locations(&self) -> impl Iterator<Item = Location> + '_ {
        self.snow.iter().enumerate().filter(|(_, s)| **s).map(|(i, _)| self.loc(i))
    }

    /// Non-empty stacks in row-major order.
    pub fn stacks(&self) -> impl Iterator<Item = (Location, SizeSet)> + '_ {
        self.balls
            .iter()
            .enumerate()
            .filter(|(_, s)| !s.is_empty())
            .map(|(i, s)| (self.loc(i), *s))
    }

    fn loc(&self, offset: usize) -> Location {
        Location::new(offset / self.width, offset % self.width)
    }

    pub fn ball_count(&self) -> usize {
        self.balls.iter().map(|s| s.len()).sum()
    }

    pub fn total_weight(&self) -> u32 {
        self.balls.iter().map(|s| s.total_weight()).sum()
    }

    /// True when every non-empty stack is a complete snowman and there are
    /// exactly `snowmen` of them.
    pub fn is_goal(&self, snowmen: usize) -> bool {
        let mut complete = 0;
        for (_, set) in self.stacks() {
            if set != SizeSet::FULL {
                return false;
            }
            complete += 1;
        }
        complete == snowmen
    }

    /// Checks the structural state invariants against `level`.
    pub fn check_invariants(&self, level: &Level) -> Result<(), String> {
        if !level.is_floor(self.character) {
            return Err(format!("character off the floor at {}", self.character));
        }
        if !self.balls_at(self.character).is_empty() {
            return Err(format!("character shares {} with a ball", self.character));
        }
        for (loc, _) in self.stacks() {
            if !level.is_floor(loc) {
                return Err(format!("ball inside a wall at {loc}"));
            }
            if self.has_snow(loc) {
                return Err(format!("snow under a ball at {loc}"));
            }
        }
        for loc in self.snow_locations() {
            if !level.is_floor(loc) {
                return Err(format!("snow inside a wall at {loc}"));
            }
        }
        Ok(())
    }
}

/// Is the given `goal` predicate satisfied in `state`.
pub fn is_goal(state: &State, snowmen: usize) -> bool {
    state.is_goal(snowmen)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StepKind {
    Walk,
    Roll,
    Push,
    Pop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct BallMove {
    pub from: Location,
    pub to: Location,
    pub size_before: BallSize,
    pub size_after: BallSize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepOutcome {
    pub kind: StepKind,
    pub next: State,
    pub moved_ball: Option<BallMove>,
}

/// Which precondition stopped a move.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum Blocked {
    #[error("wall ahead")]
    Wall,
    #[error("ball ahead has no free cell behind it")]
    BallAgainstWall,
    #[error("a ball from the top of a stack cannot land on another stack")]
    StackOntoStack,
    #[error("ball can only be pushed onto a strictly bigger ball")]
    SizeOrder,
}

/// Moves the character once in `dir`.
pub fn step(level: &Level, state: &State, dir: Direction) -> Result<StepOutcome, Blocked> {
    let here = state.character;
    let front = level.neighbor(here, dir).ok_or(Blocked::Wall)?;
    let front_balls = state.balls_at(front);
    let Some(size) = front_balls.smallest() else {
        let mut next = state.clone();
        next.character = front;
        return Ok(StepOutcome { kind: StepKind::Walk, next, moved_ball: None });
    };
    let beyond = level.neighbor(front, dir).ok_or(Blocked::BallAgainstWall)?;
    let beyond_balls = state.balls_at(beyond);
    let under = front_balls.len() >= 2;

    let kind = match (beyond_balls.smallest(), under) {
        (None, false) => StepKind::Roll,
        (None, true) => StepKind::Pop,
        (Some(_), true) => return Err(Blocked::StackOntoStack),
        (Some(top), false) if size < top => StepKind::Push,
        (Some(_), false) => return Err(Blocked::SizeOrder),
    };

    let mut next = state.clone();
    let (fi, bi) = (next.at(front), next.at(beyond));
    next.balls[fi].remove(size);
    let size_after = if next.snow[bi] { size.grow() } else { size };
    next.snow[bi] = false;
    next.balls[bi].insert(size_after);
    if kind != StepKind::Pop {
        next.character = front;
    }
    debug_assert!(next.check_invariants(level).is_ok(), "{:?}", next.check_invariants(level));
    Ok(StepOutcome {
        kind,
        next,
        moved_ball: Some(BallMove { from: front, to: beyond, size_before: size, size_after }),
    })
}

/// One keypress. Uppercase moves are the ones that move a ball.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub dir: Direction,
    pub ball: bool,
}

impl Move {
    pub fn letter(self) -> char {
        let c = self.dir.letter();
        if self.ball { c.to_ascii_uppercase() } else { c }
    }

    pub fn from_letter(ch: char) -> Option<Move> {
        let dir = match ch.to_ascii_lowercase() {
            'u' => Direction::Up,
            'd' => Direction::Down,
            'l' => Direction::Left,
            'r' => Direction::Right,
            _ => return None,
        };
        Some(Move { dir, ball: ch.is_ascii_uppercase() })
    }
}

/// A move string over `udlrUDLR`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Plan {
    pub moves: Vec<Move>,
}

impl Plan {
    pub fn new() -> Plan {
        Plan::default()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn ball_moves(&self) -> usize {
        self.moves.iter().filter(|m| m.ball).count()
    }

    pub fn extend(&mut self, other: &Plan) {
        self.moves.extend_from_slice(&other.moves);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid move character {ch:?} at position {index}")]
pub struct ParsePlanError {
    pub index: usize,
    pub ch: char,
}

impl FromStr for Plan {
    type Err = ParsePlanError;

    fn from_str(s: &str) -> Result<Plan, ParsePlanError> {
        let moves = s
            .trim()
            .chars()
            .enumerate()
            .map(|(index, ch)| Move::from_letter(ch).ok_or(ParsePlanError { index, ch }))
            .collect::<Result<_, _>>()?;
        Ok(Plan { moves })
    }
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for m in &self.moves {
            write!(f, "{}", m.letter())?;
        }
        Ok(())
    }
}

/// Replay failure. `index` is 0-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("blocked at step {}: {reason}", index + 1)]
    Blocked { index: usize, reason: Blocked },
    #[error("case mismatch at step {}: letter case disagrees with whether a ball moved", index + 1)]
    CaseMismatch { index: usize },
}

/// Folds [`step`] over `plan` from the initial state of `level`.
pub fn apply_plan(level: &Level, plan: &Plan) -> Result<State, PlanError> {
    apply_plan_from(level, State::initial(level), plan)
}

pub fn apply_plan_from(level: &Level, mut state: State, plan: &Plan) -> Result<State, PlanError> {
    for (index, m) in plan.moves.iter().enumerate() {
        let outcome = step(level, &state, m.dir).map_err(|reason| PlanError::Blocked { index, reason })?;
        if (outcome.kind != StepKind::Walk) != m.ball {
            return Err(PlanError::CaseMismatch { index });
        }
        state = outcome.next;
    }
    Ok(state)
}

/// Grid-sized mask of the cells the character can walk to without moving a ball.
pub fn reachable_mask(level: &Level, state: &State) -> Vec<bool> {
    let mut seen = vec![false; level.width() * level.height()];
    let start = state.character;
    seen[level.offset(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        for dir in Direction::ALL {
            if let Some(n) = level.neighbor(cur, dir) {
                let off = level.offset(n);
                if !seen[off] && state.balls_at(n).is_empty() {
                    seen[off] = true;
                    queue.push_back(n);
                }
            }
        }
    }
    seen
}

pub fn reachable_cells(level: &Level, state: &State) -> BTreeSet<Location> {
    let mask = reachable_mask(level, state);
    level.valid_locations().iter().copied().filter(|l| mask[level.offset(*l)]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("push position {0} is not reachable")]
    Unreachable(Location),
    #[error("no ball ahead of {0}")]
    NoBallAhead(Location),
}

/// Shortest walk to `push_from` followed by one ball move in `dir`.
///
/// BFS expands neighbours in `u, d, l, r` order, so equal-length walks are
/// resolved the same way on every run.
pub fn ball_action_to_plan(
    level: &Level,
    state: &State,
    push_from: Location,
    dir: Direction,
) -> Result<Plan, ActionError> {
    let ahead = level.neighbor(push_from, dir).ok_or(ActionError::NoBallAhead(push_from))?;
    if state.balls_at(ahead).is_empty() {
        return Err(ActionError::NoBallAhead(push_from));
    }
    if !level.is_floor(push_from) || !state.balls_at(push_from).is_empty() {
        return Err(ActionError::Unreachable(push_from));
    }
    let mut parent: Vec<Option<(Location, Direction)>> = vec![None; level.width() * level.height()];
    let mut seen = vec![false; parent.len()];
    let start = state.character;
    seen[level.offset(start)] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        if cur == push_from {
            break;
        }
        for d in Direction::ALL {
            if let Some(n) = level.neighbor(cur, d) {
                let off = level.offset(n);
                if !seen[off] && state.balls_at(n).is_empty() {
                    seen[off] = true;
                    parent[off] = Some((cur, d));
                    queue.push_back(n);
                }
            }
        }
    }
    if !seen[level.offset(push_from)] {
        return Err(ActionError::Unreachable(push_from));
    }
    let mut walk = Vec::new();
    let mut cur = push_from;
    while let Some((prev, d)) = parent[level.offset(cur)] {
        walk.push(Move { dir: d, ball: false });
        cur = prev;
    }
    walk.reverse();
    walk.push(Move { dir, ball: true });
    Ok(Plan { moves: walk })
}

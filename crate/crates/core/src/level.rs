//! Level grid, ASCII level format and the basic domain types shared by every
//! other module.
//!
//! One character per cell:
//!
//! | symbol | meaning                          |
//! |--------|----------------------------------|
//! | `#`    | wall                             |
//! | `.`    | floor                            |
//! | `'`    | floor with snow                  |
//! | `p`    | character on floor               |
//! | `P`    | character on snow                |
//! | `1`    | small ball                       |
//! | `2`    | medium ball                      |
//! | `3`    | large ball                       |
//! | `4`    | small on medium                  |
//! | `5`    | small on large                   |
//! | `6`    | medium on large                  |
//! | `7`    | small on medium on large         |
//!
//! Balls never start on snow, and the border of the grid must be wall.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A grid cell address. Rows grow downward, columns grow rightward.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Location {
    pub row: usize,
    pub col: usize,
}

impl Location {
    pub const fn new(row: usize, col: usize) -> Self {
        Location { row, col }
    }

    /// The neighbouring location in `dir`, if it does not underflow the grid.
    pub fn step(self, dir: Direction) -> Option<Location> {
        let (dr, dc) = dir.delta();
        let row = self.row.checked_add_signed(dr)?;
        let col = self.col.checked_add_signed(dc)?;
        Some(Location { row, col })
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.row, self.col)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Direction {
    Up,
    Down,
    Left,
    Right,
}

impl Direction {
    /// Fixed enumeration order, also the BFS tie-break order for walks.
    pub const ALL: [Direction; 4] = [Direction::Up, Direction::Down, Direction::Left, Direction::Right];

    pub fn delta(self) -> (isize, isize) {
        match self {
            Direction::Up => (-1, 0),
            Direction::Down => (1, 0),
            Direction::Left => (0, -1),
            Direction::Right => (0, 1),
        }
    }

    pub fn inverse(self) -> Direction {
        match self {
            Direction::Up => Direction::Down,
            Direction::Down => Direction::Up,
            Direction::Left => Direction::Right,
            Direction::Right => Direction::Left,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Lowercase move letter (`u`, `d`, `l`, `r`).
    pub fn letter(self) -> char {
        match self {
            Direction::Up => 'u',
            Direction::Down => 'd',
            Direction::Left => 'l',
            Direction::Right => 'r',
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Direction::Up => "up",
            Direction::Down => "down",
            Direction::Left => "left",
            Direction::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum BallSize {
    Small,
    Medium,
    Large,
}

impl BallSize {
    pub const ALL: [BallSize; 3] = [BallSize::Small, BallSize::Medium, BallSize::Large];

    /// Size after rolling over snow. Large balls stay large.
    pub fn grow(self) -> BallSize {
        match self {
            BallSize::Small => BallSize::Medium,
            BallSize::Medium | BallSize::Large => BallSize::Large,
        }
    }

    /// Weight used by the size arithmetic of the lower bound (S=1, M=2, L=3).
    pub fn weight(self) -> u32 {
        self as u32 + 1
    }

    pub fn index(self) -> usize {
        self as usize
    }

    fn bit(self) -> u8 {
        1 << self as u8
    }
}

/// The balls sharing one cell. Sizes are pairwise distinct, so the set alone
/// fixes the bottom-to-top order (larger below).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SizeSet(u8);

impl SizeSet {
    pub const EMPTY: SizeSet = SizeSet(0);
    pub const FULL: SizeSet = SizeSet(0b111);

    pub fn single(size: BallSize) -> Self {
        SizeSet(size.bit())
    }

    pub fn from_sizes(sizes: impl IntoIterator<Item = BallSize>) -> Self {
        let mut set = SizeSet::EMPTY;
        for s in sizes {
            set.insert(s);
        }
        set
    }

    pub fn contains(self, size: BallSize) -> bool {
        self.0 & size.bit() != 0
    }

    pub fn insert(&mut self, size: BallSize) {
        self.0 |= size.bit();
    }

    pub fn remove(&mut self, size: BallSize) {
        self.0 &= !size.bit();
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// The top ball of the stack.
    pub fn smallest(self) -> Option<BallSize> {
        self.iter().next()
    }

    /// Sizes from smallest (top) to largest (bottom).
    pub fn iter(self) -> impl Iterator<Item = BallSize> {
        BallSize::ALL.into_iter().filter(move |s| self.contains(*s))
    }

    /// Sizes bottom-first, the order used by the level format and PDDL ball numbering.
    pub fn bottom_first(self) -> Vec<BallSize> {
        let mut v: Vec<_> = self.iter().collect();
        v.reverse();
        v
    }

    pub fn total_weight(self) -> u32 {
        self.iter().map(BallSize::weight).sum()
    }

    pub fn bits(self) -> u8 {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Wall,
    Floor { snow: bool },
}

impl Cell {
    pub fn is_floor(self) -> bool {
        matches!(self, Cell::Floor { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LevelError {
    #[error("unknown symbol {symbol:?} at row {row}, column {col}")]
    UnknownSymbol { row: usize, col: usize, symbol: char },
    #[error("level has no character")]
    NoCharacter,
    #[error("level has more than one character")]
    MultipleCharacters,
    #[error("ball count {0} is not a positive multiple of 3")]
    BallCountNotMultipleOf3(usize),
    #[error("playable cell at row {row}, column {col} lies on the grid border")]
    OpenBoundary { row: usize, col: usize },
    #[error("character stands on a ball")]
    CharacterOnBall,
    #[error("row {row} has length {len}, expected {expected}")]
    RaggedRows { row: usize, len: usize, expected: usize },
    #[error("level text is empty")]
    Empty,
    #[error("ball or character outside the floor at {0}")]
    NotOnFloor(Location),
    #[error("initial ball on snow at {0}")]
    BallOnSnow(Location),
}

/// The static maze plus the initial dynamic configuration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Level {
    width: usize,
    height: usize,
    cells: Vec<Cell>,
    stacks: BTreeMap<Location, SizeSet>,
    character: Location,
    snowmen: usize,
    locations: Vec<Location>,
    index: Vec<Option<usize>>,
}

impl Level {
    /// Builds and validates a level from its parts. `cells` is row-major.
    pub fn new(
        width: usize,
        height: usize,
        cells: Vec<Cell>,
        stacks: BTreeMap<Location, SizeSet>,
        character: Location,
    ) -> Result<Level, LevelError> {
        if width == 0 || height == 0 {
            return Err(LevelError::Empty);
        }
        assert_eq!(cells.len(), width * height, "cell vector does not match dimensions");
        let at = |l: Location| cells[l.row * width + l.col];
        let inside = |l: Location| l.row < height && l.col < width;

        for row in 0..height {
            for col in 0..width {
                let border = row == 0 || col == 0 || row + 1 == height || col + 1 == width;
                if border && cells[row * width + col].is_floor() {
                    return Err(LevelError::OpenBoundary { row, col });
                }
            }
        }
        if !inside(character) || !at(character).is_floor() {
            return Err(LevelError::NotOnFloor(character));
        }
        let mut balls = 0;
        for (&loc, &set) in &stacks {
            if set.is_empty() {
                continue;
            }
            if !inside(loc) || !at(loc).is_floor() {
                return Err(LevelError::NotOnFloor(loc));
            }
            if at(loc) == (Cell::Floor { snow: true }) {
                return Err(LevelError::BallOnSnow(loc));
            }
            if loc == character {
                return Err(LevelError::CharacterOnBall);
            }
            balls += set.len();
        }
        if balls == 0 || balls % 3 != 0 {
            return Err(LevelError::BallCountNotMultipleOf3(balls));
        }
        let stacks: BTreeMap<_, _> = stacks.into_iter().filter(|(_, s)| !s.is_empty()).collect();

        let mut locations = Vec::new();
        let mut index = vec![None; width * height];
        for row in 0..height {
            for col in 0..width {
                if cells[row * width + col].is_floor() {
                    index[row * width + col] = Some(locations.len());
                    locations.push(Location { row, col });
                }
            }
        }

        Ok(Level {
            width,
            height,
            cells,
            stacks,
            character,
            snowmen: balls / 3,
            locations,
            index,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn cell(&self, loc: Location) -> Cell {
        if loc.row < self.height && loc.col < self.width {
            self.cells[loc.row * self.width + loc.col]
        } else {
            Cell::Wall
        }
    }

    pub fn is_floor(&self, loc: Location) -> bool {
        self.cell(loc).is_floor()
    }

    pub fn has_initial_snow(&self, loc: Location) -> bool {
        self.cell(loc) == Cell::Floor { snow: true }
    }

    /// Initial stacks, keyed by location.
    pub fn stacks(&self) -> &BTreeMap<Location, SizeSet> {
        &self.stacks
    }

    /// Initial stack at `loc` as a bottom-first size list.
    pub fn stack_sizes(&self, loc: Location) -> Vec<BallSize> {
        self.stacks.get(&loc).map(|s| s.bottom_first()).unwrap_or_default()
    }

    pub fn character(&self) -> Location {
        self.character
    }

    /// Number of snowmen to build (`balls / 3`).
    pub fn snowmen(&self) -> usize {
        self.snowmen
    }

    pub fn ball_count(&self) -> usize {
        self.stacks.values().map(|s| s.len()).sum()
    }

    /// Floor cells in row-major order. The position in this list is the
    /// canonical location index.
    pub fn valid_locations(&self) -> &[Location] {
        &self.locations
    }

    pub fn index_of(&self, loc: Location) -> Option<usize> {
        if loc.row < self.height && loc.col < self.width {
            self.index[loc.row * self.width + loc.col]
        } else {
            None
        }
    }

    /// The floor neighbour of `loc` in `dir`.
    pub fn neighbor(&self, loc: Location, dir: Direction) -> Option<Location> {
        loc.step(dir).filter(|n| self.is_floor(*n))
    }

    /// Row-major grid offset, used by dense per-cell state vectors.
    pub fn offset(&self, loc: Location) -> usize {
        loc.row * self.width + loc.col
    }

    pub fn render(&self) -> String {
        let mut out = String::with_capacity((self.width + 1) * self.height);
        for row in 0..self.height {
            if row > 0 {
                out.push('\n');
            }
            for col in 0..self.width {
                let loc = Location { row, col };
                let snow = self.has_initial_snow(loc);
                let ch = if !self.is_floor(loc) {
                    '#'
                } else if loc == self.character {
                    if snow { 'P' } else { 'p' }
                } else if let Some(set) = self.stacks.get(&loc) {
                    stack_symbol(*set)
                } else if snow {
                    '\''
                } else {
                    '.'
                };
                out.push(ch);
            }
        }
        out
    }
}

fn stack_symbol(set: SizeSet) -> char {
    match set.bits() {
        0b001 => '1',
        0b010 => '2',
        0b100 => '3',
        0b011 => '4',
        0b101 => '5',
        0b110 => '6',
        0b111 => '7',
        _ => '.',
    }
}

fn symbol_stack(ch: char) -> Option<SizeSet> {
    use BallSize::*;
    let sizes: &[BallSize] = match ch {
        '1' => &[Small],
        '2' => &[Medium],
        '3' => &[Large],
        '4' => &[Small, Medium],
        '5' => &[Small, Large],
        '6' => &[Medium, Large],
        '7' => &[Small, Medium, Large],
        _ => return None,
    };
    Some(SizeSet::from_sizes(sizes.iter().copied()))
}

pub fn parse_level(text: &str) -> Result<Level, LevelError> {
    let rows: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
    let rows: Vec<&str> = {
        let end = rows.iter().rposition(|r| !r.is_empty()).map_or(0, |i| i + 1);
        rows[..end].to_vec()
    };
    if rows.is_empty() {
        return Err(LevelError::Empty);
    }
    let width = rows[0].chars().count();
    let height = rows.len();
    let mut cells = Vec::with_capacity(width * height);
    let mut stacks = BTreeMap::new();
    let mut character = None;

    for (row, line) in rows.iter().enumerate() {
        let len = line.chars().count();
        if len != width {
            return Err(LevelError::RaggedRows { row, len, expected: width });
        }
        for (col, ch) in line.chars().enumerate() {
            let loc = Location { row, col };
            let cell = match ch {
                '#' => Cell::Wall,
                '.' => Cell::Floor { snow: false },
                '\'' => Cell::Floor { snow: true },
                'p' | 'P' => {
                    if character.replace(loc).is_some() {
                        return Err(LevelError::MultipleCharacters);
                    }
                    Cell::Floor { snow: ch == 'P' }
                }
                _ => match symbol_stack(ch) {
                    Some(set) => {
                        stacks.insert(loc, set);
                        Cell::Floor { snow: false }
                    }
                    None => return Err(LevelError::UnknownSymbol { row, col, symbol: ch }),
                },
            };
            cells.push(cell);
        }
    }
    let character = character.ok_or(LevelError::NoCharacter)?;
    let balls: usize = stacks.values().map(|s: &SizeSet| s.len()).sum();
    if balls == 0 || !balls.is_multiple_of(3) {
        return Err(LevelError::BallCountNotMultipleOf3(balls));
    }
    Level::new(width, height, cells, stacks, character)
}

impl FromStr for Level {
    type Err = LevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_level(s)
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

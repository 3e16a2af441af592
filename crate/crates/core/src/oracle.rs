//! Exhaustive breadth-first search over ball actions.
//!
//! One edge is one ball move performed from any cell of the character's
//! current region, so the BFS depth is the ball-move count. States that
//! differ only by the character's position inside a region are merged.

use std::collections::HashSet;

use crate::level::{Direction, Level, Location, SizeSet};
use crate::sim::{self, State, StepKind};
use crate::sim::Plan;

/// Region-normalised state key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalState {
    pub snow: Vec<Location>,
    pub stacks: Vec<(Location, SizeSet)>,
    /// Smallest location (row-major) the character can reach.
    pub char_region: Location,
}

pub fn canonicalize(level: &Level, state: &State) -> CanonicalState {
    let mask = sim::reachable_mask(level, state);
    let char_region = level
        .valid_locations()
        .iter()
        .copied()
        .find(|l| mask[level.offset(*l)])
        .unwrap_or(state.character());
    CanonicalState {
        snow: state.snow_locations().collect(),
        stacks: state.stacks().collect(),
        char_region,
    }
}

/// A ball action: push from `push_from` towards `dir`.
pub type BallAction = (Location, Direction);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_ball_moves: usize,
    pub node_cap: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_ball_moves: 20, node_cap: 10_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleOutcome {
    Solved { ball_moves: usize, plan: Plan, actions: Vec<BallAction> },
    /// Every state reachable within the bound was explored; none is a goal.
    NoSolutionWithin(usize),
    /// The whole state space was explored; the level has no solution.
    Unsolvable,
    /// The node cap was hit first.
    Unknown { explored: usize },
}

impl OracleOutcome {
    pub fn ball_moves(&self) -> Option<usize> {
        match self {
            OracleOutcome::Solved { ball_moves, .. } => Some(*ball_moves),
            _ => None,
        }
    }
}

struct Node {
    state: State,
    parent: usize,
    action: Option<BallAction>,
}

/// All ball actions available from `state`, with their successor states.
/// The successor keeps the character where the move leaves it.
pub fn successors(level: &Level, state: &State) -> Vec<(BallAction, State)> {
    let mask = sim::reachable_mask(level, state);
    let mut out = Vec::new();
    for &from in level.valid_locations() {
        if !mask[level.offset(from)] {
            continue;
        }
        let positioned = state.with_character(from);
        for dir in Direction::ALL {
            let Some(front) = level.neighbor(from, dir) else { continue };
            if state.balls_at(front).is_empty() {
                continue;
            }
            if let Ok(o) = sim::step(level, &positioned, dir) {
                debug_assert_ne!(o.kind, StepKind::Walk);
                out.push(((from, dir), o.next));
            }
        }
    }
    out
}

pub fn solve_optimal(level: &Level, max_ball_moves: usize) -> OracleOutcome {
    search(level, OracleLimits { max_ball_moves, ..OracleLimits::default() })
}

pub fn search(level: &Level, limits: OracleLimits) -> OracleOutcome {
    let snowmen = level.snowmen();
    let start = State::initial(level);
    if start.is_goal(snowmen) {
        return OracleOutcome::Solved { ball_moves: 0, plan: Plan::new(), actions: Vec::new() };
    }
    let mut seen = HashSet::new();
    seen.insert(canonicalize(level, &start));
    let mut nodes = vec![Node { state: start, parent: usize::MAX, action: None }];
    let mut layer = 0..1;
    let mut depth = 0;

    while !layer.is_empty() {
        if depth == limits.max_ball_moves {
            return OracleOutcome::NoSolutionWithin(limits.max_ball_moves);
        }
        depth += 1;
        let next_start = nodes.len();
        for idx in layer.clone() {
            for (action, next) in successors(level, &nodes[idx].state) {
                if !seen.insert(canonicalize(level, &next)) {
                    continue;
                }
                let goal = next.is_goal(snowmen);
                nodes.push(Node { state: next, parent: idx, action: Some(action) });
                if goal {
                    let actions = trace(&nodes, nodes.len() - 1);
                    let plan = expand_actions(level, &actions)
                        .expect("oracle actions replay on the simulator");
                    return OracleOutcome::Solved { ball_moves: depth, plan, actions };
                }
                if nodes.len() > limits.node_cap {
                    return OracleOutcome::Unknown { explored: nodes.len() };
                }
            }
        }
        layer = next_start..nodes.len();
    }
    OracleOutcome::Unsolvable
}

fn trace(nodes: &[Node], mut idx: usize) -> Vec<BallAction> {
    let mut actions = Vec::new();
    while let Some(a) = nodes[idx].action {
        actions.push(a);
        idx = nodes[idx].parent;
    }
    actions.reverse();
    actions
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExpandError {
    #[error("ball action {index}: {source}")]
    Action { index: usize, source: sim::ActionError },
    #[error("ball action {index}: {source}")]
    Replay { index: usize, source: sim::PlanError },
}

/// Expands ball actions into a full move string by inserting shortest walks.
pub fn expand_actions(level: &Level, actions: &[BallAction]) -> Result<Plan, ExpandError> {
    let mut state = State::initial(level);
    let mut plan = Plan::new();
    for (index, &(from, dir)) in actions.iter().enumerate() {
        let fragment = sim::ball_action_to_plan(level, &state, from, dir)
            .map_err(|source| ExpandError::Action { index, source })?;
        state = sim::apply_plan_from(level, state, &fragment)
            .map_err(|source| ExpandError::Replay { index, source })?;
        plan.extend(&fragment);
    }
    Ok(plan)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::parse_level;
    use std::collections::BTreeMap;

    #[test]
    fn mini2_needs_one_push() {
        let level = parse_level("#####\n#p16#\n#####").unwrap();
        match solve_optimal(&level, 20) {
            OracleOutcome::Solved { ball_moves, plan, .. } => {
                assert_eq!(ball_moves, 1);
                assert_eq!(plan.to_string(), "R");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn presolved_level_is_depth_zero() {
        let level = parse_level("#####\n#p7.#\n#####").unwrap();
        assert_eq!(solve_optimal(&level, 20).ball_moves(), Some(0));
    }

    #[test]
    fn unsolvable_and_bounded() {
        // Three large balls can never form a snowman.
        let level = parse_level("#######\n#p3.3.#\n#..3..#\n#######").unwrap();
        assert_eq!(solve_optimal(&level, 20), OracleOutcome::Unsolvable);
        let level = parse_level("########\n#p1.2.3#\n#......#\n########").unwrap();
        assert_eq!(solve_optimal(&level, 1), OracleOutcome::NoSolutionWithin(1));
        assert!(matches!(
            search(&level, OracleLimits { max_ball_moves: 20, node_cap: 3 }),
            OracleOutcome::Unknown { .. }
        ));
    }

    #[test]
    fn canonical_merges_same_region() {
        let level = parse_level("######\n#p...#\n#....#\n#.7..#\n######").unwrap();
        let a = State::initial(&level);
        let b = a.with_character(Location::new(2, 4));
        assert_eq!(canonicalize(&level, &a), canonicalize(&level, &b));
        assert_eq!(canonicalize(&level, &a), canonicalize(&level, &a.clone()));
    }

    #[test]
    fn canonical_separates_regions() {
        let level = parse_level("#######\n#p.1..#\n#..2..#\n#..3..#\n#######").unwrap();
        let a = State::initial(&level);
        let b = a.with_character(Location::new(1, 5));
        assert_ne!(canonicalize(&level, &a), canonicalize(&level, &b));
        let moved = State::from_parts(
            &level,
            [],
            &BTreeMap::from([(Location::new(1, 4), SizeSet::FULL)]),
            Location::new(1, 1),
        );
        assert_ne!(canonicalize(&level, &a), canonicalize(&level, &moved));
    }
}

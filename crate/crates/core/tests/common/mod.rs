#![allow(dead_code)]

pub mod gadgets;

use std::collections::{HashSet, VecDeque};

use rand::rngs::StdRng;
use snowplan::cnf::Assignment;
use snowplan::corpus::{self, GenParams};
use snowplan::encoder::Encoding;
use snowplan::level::{Direction, Level};
use snowplan::sim::{self, State, StepKind};

/// A random enclosed level with interior up to `max_w` x `max_h`.
pub fn random_level(rng: &mut StdRng, max_w: usize, max_h: usize, snowmen: usize) -> Level {
    let params = GenParams { max_width: max_w, max_height: max_h, snowmen, ..GenParams::default() };
    corpus::random_level(rng, &params)
}

/// Plain BFS over full states: fewest moves of any kind to a goal.
pub fn min_total_moves(level: &Level, cap: usize) -> Option<usize> {
    let start = State::initial(level);
    let mut seen = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([(start, 0usize)]);
    while let Some((state, depth)) = queue.pop_front() {
        if state.is_goal(level.snowmen()) {
            return Some(depth);
        }
        if depth == cap {
            continue;
        }
        for d in Direction::ALL {
            if let Ok(o) = sim::step(level, &state, d) {
                if seen.insert(o.next.clone()) {
                    queue.push_back((o.next, depth + 1));
                }
            }
        }
    }
    None
}

/// 0-1 BFS over full states where walks are free: fewest ball moves to a goal.
pub fn min_ball_moves(level: &Level, cap: usize) -> Option<usize> {
    let start = State::initial(level);
    let mut best = std::collections::HashMap::from([(start.clone(), 0usize)]);
    let mut deque = VecDeque::from([(start, 0usize)]);
    while let Some((state, cost)) = deque.pop_front() {
        if best[&state] < cost {
            continue;
        }
        if state.is_goal(level.snowmen()) {
            return Some(cost);
        }
        for d in Direction::ALL {
            let Ok(o) = sim::step(level, &state, d) else { continue };
            let w = usize::from(o.kind != StepKind::Walk);
            let c = cost + w;
            if c > cap || best.get(&o.next).is_some_and(|&b| b <= c) {
                continue;
            }
            best.insert(o.next.clone(), c);
            if w == 0 {
                deque.push_front((o.next, c));
            } else {
                deque.push_back((o.next, c));
            }
        }
    }
    None
}

pub fn solve(enc: &Encoding) -> Option<Assignment> {
    let clauses: Vec<Vec<i32>> = enc.formula.clauses().iter().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
    match cdcl::solve_clauses(enc.formula.var_count(), &clauses) {
        cdcl::SolveResult::Sat(m) => Some(Assignment::new(m)),
        cdcl::SolveResult::Unsat => None,
        cdcl::SolveResult::Unknown => unreachable!("no budget set"),
    }
}

/// Draws random levels until one is solvable within `max_ball_moves`.
pub fn random_solvable_level(rng: &mut StdRng, max_w: usize, max_h: usize, max_ball_moves: usize) -> Level {
    let params = GenParams { max_width: max_w, max_height: max_h, ..GenParams::default() };
    corpus::random_solvable_level(rng, &params, max_ball_moves).0
}

//! Replay a move string step by step with the simulator.
//!
//! ```text
//! cargo run --example replay_plan [level.lvl] [moves]
//! ```

use snowplan::corpus::Corpus;
use snowplan::level::{Direction, Level};
use snowplan::sim::{self, Plan, State};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (level, moves): (Level, String) = match args.as_slice() {
        [path, moves] => (std::fs::read_to_string(path)?.parse()?, moves.clone()),
        _ => {
            let corpus = Corpus::load_default()?;
            let entry = corpus.entry("andy").expect("andy is in the manifest");
            (corpus.level(entry)?, entry.reference_plan.clone().unwrap_or_default())
        }
    };
    let plan: Plan = moves.parse()?;
    let mut state = State::initial(&level);
    for (i, ch) in moves.chars().enumerate() {
        let dir = match ch.to_ascii_lowercase() {
            'u' => Direction::Up,
            'd' => Direction::Down,
            'l' => Direction::Left,
            _ => Direction::Right,
        };
        let outcome = sim::step(&level, &state, dir).map_err(|e| format!("step {}: {e}", i + 1))?;
        if let Some(ball) = outcome.moved_ball {
            println!(
                "{:>3} {ch} {:?}: {:?} {} -> {:?} {}",
                i + 1,
                outcome.kind,
                ball.size_before,
                ball.from,
                ball.size_after,
                ball.to
            );
        }
        state = outcome.next;
    }
    println!("{} moves, {} ball moves, goal reached: {}", plan.len(), plan.ball_moves(), state.is_goal(level.snowmen()));
    Ok(())
}

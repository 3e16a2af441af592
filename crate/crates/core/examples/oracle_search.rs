//! Exhaustive search for the fewest ball moves.
//!
//! ```text
//! cargo run --release --example oracle_search [level.lvl] [max-ball-moves]
//! ```

use std::time::Instant;

use snowplan::corpus::Corpus;
use snowplan::level::Level;
use snowplan::oracle::{self, OracleLimits, OracleOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let level: Level = match args.next() {
        Some(path) => std::fs::read_to_string(path)?.parse()?,
        None => {
            let corpus = Corpus::load_default()?;
            corpus.level(corpus.entry("two-snowmen").expect("in manifest"))?
        }
    };
    let max_ball_moves = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20);
    println!("{}\n", level.render());

    let started = Instant::now();
    let outcome = oracle::search(&level, OracleLimits { max_ball_moves, ..OracleLimits::default() });
    match outcome {
        OracleOutcome::Solved { ball_moves, plan, actions } => {
            println!("optimum: {ball_moves} ball moves ({} moves in total)", plan.len());
            println!("plan: {plan}");
            for (from, dir) in actions {
                println!("  push from {from} {}", dir.name());
            }
        }
        other => println!("{other:?}"),
    }
    println!("{:.3}s", started.elapsed().as_secs_f64());
    Ok(())
}

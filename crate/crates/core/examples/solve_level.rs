//! Find a plan with the fewest ball moves by deepening the horizon until the
//! formula becomes satisfiable.
//!
//! ```text
//! cargo run --release --example solve_level [level.lvl] [encoding]
//! ```

use snowplan::corpus::Corpus;
use snowplan::driver::{self, SolveOptions, SolverBackend};
use snowplan::encoder::Variant;
use snowplan::level::Level;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let level: Level = match args.next() {
        Some(path) => std::fs::read_to_string(path)?.parse()?,
        None => {
            let corpus = Corpus::load_default()?;
            corpus.level(corpus.entry("andy").expect("in manifest"))?
        }
    };
    let variant: Variant = args.next().as_deref().unwrap_or("reach-count").parse()?;
    println!("{}\n", level.render());

    let report = driver::solve(&level, variant, &SolverBackend::Bundled, SolveOptions::default())?;
    for h in &report.horizons {
        println!("T={:<2} {:?} ({} vars, {} clauses, {:.2}s)", h.horizon, h.result, h.vars, h.clauses, h.seconds);
    }
    if let Some(plan) = &report.plan {
        println!("plan: {plan}");
        println!("{} ball moves, {} moves", plan.ball_moves(), plan.len());
    }
    println!("certified optimal: {}", report.certified_optimal);
    Ok(())
}

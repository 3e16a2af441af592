//! Without reachability constraints the encoding lets the character teleport
//! to any free push position. The first satisfiable horizon can then be too
//! small and its plan cannot be walked.
//!
//! ```text
//! cargo run --release --example cheating_plans
//! ```

use snowplan::corpus::Corpus;
use snowplan::driver::{self, SolveOptions, SolverBackend};
use snowplan::encoder::Variant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = Corpus::load_default()?;
    let level = corpus.level(corpus.entry("cheat-boxed").expect("in manifest"))?;
    println!("{}\n", level.render());

    for variant in [Variant::Cheating, Variant::ReachCount] {
        let r = driver::solve(&level, variant, &SolverBackend::Bundled, SolveOptions::default())?;
        print!("{variant:<12} first SAT horizon {:?}", r.sat_horizon);
        match (&r.plan, &r.invalid_reason) {
            (Some(plan), _) => println!(", valid plan {plan}"),
            (None, Some(reason)) => println!(", invalid: {reason}"),
            (None, None) => println!(", no plan"),
        }
    }
    Ok(())
}

//! Run the horizon loop against an external DIMACS solver process.
//!
//! The command is taken from the first argument or `SNOWPLAN_SOLVER`, e.g.
//! `"kissat -q {}"` (file path in place of `{}`) or `"minisat -"` (stdin).
//! Without either, the example drives its own `snowplan sat` binary.
//!
//! ```text
//! cargo build && cargo run --example external_solver -- "kissat -q {}"
//! ```

use snowplan::corpus::Corpus;
use snowplan::driver::{self, SolveOptions, SolverBackend, SOLVER_ENV};
use snowplan::encoder::Variant;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let command = std::env::args().nth(1).or_else(|| std::env::var(SOLVER_ENV).ok()).unwrap_or_else(|| {
        let exe = std::env::current_exe().expect("current exe");
        let bin = exe.parent().and_then(|p| p.parent()).expect("target dir").join("snowplan");
        format!("{} sat {{}}", bin.display())
    });
    let backend = SolverBackend::from_command(&command)?;
    println!("solver: {}", backend.describe());

    let corpus = Corpus::load_default()?;
    let level = corpus.level(corpus.entry("two-snowmen").expect("in manifest"))?;
    let opts = SolveOptions { call_timeout: Some(std::time::Duration::from_secs(30)), ..SolveOptions::default() };
    let report = driver::solve(&level, Variant::ReachOrder, &backend, opts)?;
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

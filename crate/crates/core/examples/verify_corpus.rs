//! Check every corpus entry: parse, replay reference plans, and compare the
//! recorded optimum with exhaustive search.
//!
//! ```text
//! cargo run --release --example verify_corpus [corpus-dir]
//! ```

use snowplan::corpus::{self, Corpus};
use snowplan::oracle::OracleLimits;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let corpus = match std::env::args().nth(1) {
        Some(dir) => Corpus::load(dir.as_ref())?,
        None => Corpus::load_default()?,
    };
    let checks = corpus::verify_corpus(&corpus, OracleLimits::default());
    for c in &checks {
        println!("{:<16} {}", c.id, serde_json::to_string(&c.status)?);
    }
    let failures = checks.iter().filter(|c| c.status.is_failure()).count();
    println!("{} entries, {failures} failures", checks.len());
    if failures > 0 {
        std::process::exit(1);
    }
    Ok(())
}

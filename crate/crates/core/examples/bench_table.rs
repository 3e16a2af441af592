//! Compare encodings on a directory of levels and print the results table
//! with solved counts and PAR-2 scores.
//!
//! ```text
//! cargo run --release --example bench_table [dir] [timeout-secs]
//! ```

use std::time::Duration;

use snowplan::bench::{self, BenchConfig};
use snowplan::corpus::Corpus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let instances = match args.next() {
        Some(dir) => bench::load_dir(dir.as_ref())?,
        None => {
            let corpus = Corpus::load_default()?;
            ["mini2", "two-snowmen", "cheat-boxed", "rand01", "rand02"]
                .iter()
                .map(|id| Ok((id.to_string(), corpus.level(corpus.entry(id).expect("in manifest"))?)))
                .collect::<Result<Vec<_>, snowplan::corpus::CorpusError>>()?
        }
    };
    let timeout: f64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(20.0);
    let cfg = BenchConfig {
        timeout: Duration::from_secs_f64(timeout),
        workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        ..BenchConfig::default()
    };
    let records = bench::run_bench(&instances, &cfg);
    print!("{}", bench::render_table(&records, &cfg.approaches, timeout));
    println!("\n(! = plan failed validation, ? = optimality not certified)");
    Ok(())
}

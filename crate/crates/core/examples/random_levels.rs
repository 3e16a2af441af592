//! Generate random solvable levels with their optimal ball-move counts.
//!
//! ```text
//! cargo run --release --example random_levels [count] [seed]
//! ```

use rand::rngs::StdRng;
use rand::SeedableRng;
use snowplan::corpus::{random_solvable_level, GenParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let seed: u64 = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let mut rng = StdRng::seed_from_u64(seed);
    let params = GenParams { max_width: 5, max_height: 4, ..GenParams::default() };
    for _ in 0..count {
        let (level, optimum) = random_solvable_level(&mut rng, &params, 10);
        println!("{}\noptimum: {optimum} ball moves\n", level.render());
    }
    Ok(())
}

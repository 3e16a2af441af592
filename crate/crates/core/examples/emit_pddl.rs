//! Generate PDDL domain and problem files for classical planners.
//!
//! ```text
//! cargo run --example emit_pddl [basic|cheating|reachability] [out-dir]
//! ```

use snowplan::level::Level;
use snowplan::pddl::{self, PddlVariant};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let variant: PddlVariant = args.next().as_deref().unwrap_or("reachability").parse()?;
    let level: Level = "######\n#p'3.#\n#.21.#\n######".parse()?;

    match args.next() {
        Some(dir) => {
            let (domain, problem) = pddl::write_files(&level, "example", variant, dir.as_ref())?;
            println!("wrote {} and {}", domain.display(), problem.display());
        }
        None => {
            println!("{}", pddl::emit_domain(variant, level.snowmen()));
            println!("{}", pddl::emit_problem(&level, variant));
        }
    }
    Ok(())
}

//! Parse a level from text, inspect it, and render it back.
//!
//! ```text
//! cargo run --example parse_level
//! ```

use snowplan::driver::lower_bound;
use snowplan::level::Level;

const LEVEL: &str = "\
#######
#...''#
#.1'1.#
#.'P'.#
#'1..##
#.'#.##
#######";

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let level: Level = LEVEL.parse()?;
    println!("{}", level.render());
    println!();
    println!("{} x {} grid, {} walkable cells", level.width(), level.height(), level.valid_locations().len());
    println!("{} balls, {} snowman to build", level.ball_count(), level.snowmen());
    println!("character at {}", level.character());
    for loc in level.stacks().keys() {
        println!("  stack at {loc}: {:?}", level.stack_sizes(*loc));
    }
    println!("lower bound on ball moves: {}", lower_bound(&level));

    // Malformed input is rejected with a reason.
    let err = "#####\n#p11#\n#####".parse::<Level>().unwrap_err();
    println!("rejected: {err}");
    Ok(())
}

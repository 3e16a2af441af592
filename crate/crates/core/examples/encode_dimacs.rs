//! Build the CNF formula for one horizon and write it as DIMACS.
//!
//! ```text
//! cargo run --example encode_dimacs [reach-order|reach-count|cheating|basic] [T] > f.cnf
//! ```

use snowplan::encoder::{encode, EncodingSpec, Variant};
use snowplan::level::Level;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let variant: Variant = args.next().as_deref().unwrap_or("reach-count").parse()?;
    let horizon: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(1);
    let level: Level = "#####\n#p3'#\n#.21#\n#####".parse()?;

    let enc = encode(&level, EncodingSpec::new(variant, horizon));
    eprintln!(
        "{variant} at T={horizon}: {} variables, {} clauses",
        enc.formula.var_count(),
        enc.formula.clause_count()
    );
    // Named variables can be looked up after encoding.
    if let Some(v) = enc.formula.var("c@r1c1@t0") {
        eprintln!("character-at-start variable is {}", v.get());
    }
    print!("{}", enc.formula.to_dimacs(true));
    Ok(())
}

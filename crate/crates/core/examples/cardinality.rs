//! The cardinality gadgets used by the encodings, checked against counting.
//!
//! ```text
//! cargo run --example cardinality
//! ```

use snowplan::cnf::{CnfFormula, ExactlyOneMethod};

fn count_models(n: usize, build: impl Fn(&mut CnfFormula, &[snowplan::cnf::Lit])) -> Vec<usize> {
    let mut f = CnfFormula::new();
    let xs: Vec<_> = (0..n).map(|i| f.new_var(format!("x{i}")).unwrap().pos()).collect();
    build(&mut f, &xs);
    let base: Vec<Vec<i32>> = f.clauses().iter().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
    let mut sat_counts = Vec::new();
    for bits in 0u32..1 << n {
        let mut clauses = base.clone();
        clauses.extend(xs.iter().enumerate().map(|(i, x)| vec![if bits >> i & 1 == 1 { x.dimacs() } else { -x.dimacs() }]));
        if matches!(cdcl::solve_clauses(f.var_count(), &clauses), cdcl::SolveResult::Sat(_)) {
            sat_counts.push(bits.count_ones() as usize);
        }
    }
    sat_counts.sort_unstable();
    sat_counts.dedup();
    sat_counts
}

fn main() {
    let n = 6;
    for m in [ExactlyOneMethod::Pairwise, ExactlyOneMethod::Sequential] {
        println!("exactly-one {m:?}: satisfiable at counts {:?}", count_models(n, |f, xs| f.exactly_one(xs, m)));
    }
    for k in [0, 2, 4] {
        println!("at-most-{k}: satisfiable at counts {:?}", count_models(n, |f, xs| f.at_most_k(xs, k)));
        println!("at-least-{k}: satisfiable at counts {:?}", count_models(n, |f, xs| f.at_least_k(xs, k)));
    }
}

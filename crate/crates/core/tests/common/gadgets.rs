//! Exhaustive comparison of the cardinality gadgets with a counting oracle.
//! Auxiliary variables are projected out by asking the solver whether the
//! gadget extends a fixed assignment of the primary variables.

use snowplan::cnf::{CnfFormula, ExactlyOneMethod, Lit};

#[derive(Clone, Copy, Debug)]
pub enum Gadget {
    ExactlyOne(ExactlyOneMethod),
    AtMost(usize),
    AtLeast(usize),
}

impl Gadget {
    pub fn expected(self, count: usize) -> bool {
        match self {
            Gadget::ExactlyOne(_) => count == 1,
            Gadget::AtMost(k) => count <= k,
            Gadget::AtLeast(k) => count >= k,
        }
    }
}

pub fn build(n: usize, gadget: Gadget) -> (CnfFormula, Vec<Lit>) {
    let mut f = CnfFormula::new();
    let xs: Vec<Lit> = (0..n).map(|i| f.new_var(format!("x{i}")).unwrap().pos()).collect();
    match gadget {
        Gadget::ExactlyOne(m) => f.exactly_one(&xs, m),
        Gadget::AtMost(k) => f.at_most_k(&xs, k),
        Gadget::AtLeast(k) => f.at_least_k(&xs, k),
    }
    (f, xs)
}

pub fn extends(f: &CnfFormula, xs: &[Lit], bits: u32) -> bool {
    let mut clauses: Vec<Vec<i32>> = f.clauses().iter().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
    for (i, x) in xs.iter().enumerate() {
        let lit = if bits >> i & 1 == 1 { *x } else { !*x };
        clauses.push(vec![lit.dimacs()]);
    }
    match cdcl::solve_clauses(f.var_count(), &clauses) {
        cdcl::SolveResult::Sat(_) => true,
        cdcl::SolveResult::Unsat => false,
        cdcl::SolveResult::Unknown => unreachable!(),
    }
}

/// Number of primary assignments where the gadget and the oracle disagree.
pub fn check(n: usize, gadget: Gadget) -> usize {
    let (f, xs) = build(n, gadget);
    (0u32..1 << n)
        .filter(|&bits| extends(&f, &xs, bits) != gadget.expected(bits.count_ones() as usize))
        .count()
}

/// Mismatches over exactly-one (every method), at-most-k and at-least-k for
/// all `n <= max_n` and all `k`.
pub fn total_mismatches(max_n: usize) -> usize {
    let mut total = 0;
    for n in 1..=max_n {
        for m in [ExactlyOneMethod::Pairwise, ExactlyOneMethod::Sequential, ExactlyOneMethod::Auto] {
            total += check(n, Gadget::ExactlyOne(m));
        }
        for k in 0..=n {
            total += check(n, Gadget::AtMost(k)) + check(n, Gadget::AtLeast(k));
        }
    }
    total
}

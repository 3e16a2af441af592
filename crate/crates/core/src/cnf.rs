//! Named Boolean variables, clause construction, cardinality gadgets,
//! DIMACS output and SAT-competition model parsing.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::ops::Not;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    pub fn get(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit(self.0 as i32)
    }

    pub fn neg(self) -> Lit {
        Lit(-(self.0 as i32))
    }
}

/// A signed DIMACS literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn var(self) -> VarId {
        VarId(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn dimacs(self) -> i32 {
        self.0
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl From<VarId> for Lit {
    fn from(v: VarId) -> Lit {
        v.pos()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CnfError {
    #[error("variable name {0:?} is already registered")]
    DuplicateName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExactlyOneMethod {
    Pairwise,
    Sequential,
    /// Pairwise up to six variables, sequential above.
    #[default]
    Auto,
}

#[derive(Debug, Clone, Default)]
pub struct CnfFormula {
    var_count: u32,
    clauses: Vec<Vec<Lit>>,
    names: HashMap<String, VarId>,
    labels: Vec<String>,
    aux: u32,
}

impl CnfFormula {
    pub fn new() -> CnfFormula {
        CnfFormula::default()
    }

    pub fn var_count(&self) -> usize {
        self.var_count as usize
    }

    pub fn clauses(&self) -> &[Vec<Lit>] {
        &self.clauses
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn new_var(&mut self, name: impl Into<String>) -> Result<VarId, CnfError> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(CnfError::DuplicateName(name));
        }
        self.var_count += 1;
        let id = VarId(self.var_count);
        self.names.insert(name.clone(), id);
        self.labels.push(name);
        Ok(id)
    }

    /// Fresh auxiliary variable named `<prefix>#<n>`.
    pub fn aux_var(&mut self, prefix: &str) -> VarId {
        loop {
            self.aux += 1;
            if let Ok(v) = self.new_var(format!("{prefix}#{}", self.aux)) {
                return v;
            }
        }
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.names.get(name).copied()
    }

    pub fn name(&self, var: VarId) -> &str {
        &self.labels[var.0 as usize - 1]
    }

    /// Adds a clause. Duplicate literals are merged and tautologies dropped;
    /// an empty clause is recorded as a contradiction on a fresh variable so
    /// the clause list never contains an empty clause.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let mut c: Vec<Lit> = lits.into_iter().collect();
        for l in &c {
            assert!(l.0 != 0 && l.0.unsigned_abs() <= self.var_count, "literal {l:?} out of range");
        }
        c.sort_unstable_by_key(|l| (l.0.unsigned_abs(), l.0));
        c.dedup();
        if c.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if c.is_empty() {
            let f = self.aux_var("false");
            self.clauses.push(vec![f.pos()]);
            self.clauses.push(vec![f.neg()]);
            return;
        }
        self.clauses.push(c);
    }

    pub fn add_unit(&mut self, lit: Lit) {
        self.add_clause([lit]);
    }

    /// `a1 ∧ … ∧ an → (c1 ∨ … ∨ cm)`
    pub fn add_implication(&mut self, antecedent: &[Lit], consequent: &[Lit]) {
        let c: Vec<Lit> = antecedent.iter().map(|l| !*l).chain(consequent.iter().copied()).collect();
        self.add_clause(c);
    }

    pub fn exactly_one(&mut self, vars: &[Lit], method: ExactlyOneMethod) {
        assert!(!vars.is_empty(), "exactly_one needs at least one variable");
        self.add_clause(vars.iter().copied());
        let pairwise = match method {
            ExactlyOneMethod::Pairwise => true,
            ExactlyOneMethod::Sequential => false,
            ExactlyOneMethod::Auto => vars.len() <= 6,
        };
        if pairwise {
            for i in 0..vars.len() {
                for j in i + 1..vars.len() {
                    self.add_clause([!vars[i], !vars[j]]);
                }
            }
        } else {
            self.at_most_k(vars, 1);
        }
    }

    /// Sequential-counter encoding of `Σ vars ≤ k`.
    pub fn at_most_k(&mut self, vars: &[Lit], k: usize) {
        let n = vars.len();
        if k >= n {
            return;
        }
        if k == 0 {
            for &x in vars {
                self.add_unit(!x);
            }
            return;
        }
        // s[i][j]: at least j+1 of vars[0..=i] are true.
        let s: Vec<Vec<Lit>> = (0..n - 1)
            .map(|_| (0..k).map(|_| self.aux_var("cnt").pos()).collect())
            .collect();
        self.add_clause([!vars[0], s[0][0]]);
        for j in 1..k {
            self.add_unit(!s[0][j]);
        }
        for i in 1..n - 1 {
            self.add_clause([!vars[i], s[i][0]]);
            self.add_clause([!s[i - 1][0], s[i][0]]);
            for j in 1..k {
                self.add_clause([!vars[i], !s[i - 1][j - 1], s[i][j]]);
                self.add_clause([!s[i - 1][j], s[i][j]]);
            }
            self.add_clause([!vars[i], !s[i - 1][k - 1]]);
        }
        self.add_clause([!vars[n - 1], !s[n - 2][k - 1]]);
    }

    /// `Σ vars ≥ k`, as at-most-(n−k) over the negations.
    pub fn at_least_k(&mut self, vars: &[Lit], k: usize) {
        assert!(k <= vars.len(), "at_least_k with k > n is unsatisfiable by construction");
        if k == 0 {
            return;
        }
        let negated: Vec<Lit> = vars.iter().map(|l| !*l).collect();
        self.at_most_k(&negated, vars.len() - k);
    }

    pub fn to_dimacs(&self, with_comments: bool) -> String {
        let mut out = String::new();
        if with_comments {
            for (i, name) in self.labels.iter().enumerate() {
                let _ = writeln!(out, "c {name} = {}", i + 1);
            }
        }
        let _ = writeln!(out, "p cnf {} {}", self.var_count, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                let _ = write!(out, "{} ", l.0);
            }
            out.push_str("0\n");
        }
        out
    }

    /// Index of the first clause `assignment` falsifies.
    pub fn first_violated(&self, assignment: &Assignment) -> Option<usize> {
        self.clauses.iter().position(|c| !c.iter().any(|&l| assignment.lit(l)))
    }
}

/// A total assignment over a formula's variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Assignment(Vec<bool>);

impl Assignment {
    /// `values[i]` is the value of variable `i + 1`.
    pub fn new(values: Vec<bool>) -> Assignment {
        Assignment(values)
    }

    pub fn value(&self, var: VarId) -> bool {
        self.0[var.0 as usize - 1]
    }

    pub fn lit(&self, lit: Lit) -> bool {
        self.value(lit.var()) == lit.is_positive()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat(Assignment),
    Unsat,
    /// `s UNKNOWN`, typically a solver-side limit.
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("solver output has no status line")]
    MalformedOutput,
    #[error("bad token {0:?} in a value line")]
    BadToken(String),
    #[error("model leaves variable {0} unassigned")]
    IncompleteModel(u32),
    #[error("model falsifies clause {0}")]
    ViolatedClause(usize),
}

/// Parses SAT-competition output (`s …` status line plus `v …` lines) and
/// checks that a reported model satisfies every clause of `formula`.
pub fn parse_model(solver_output: &str, formula: &CnfFormula) -> Result<SolverAnswer, ModelError> {
    let mut status = None;
    let mut values: Vec<Option<bool>> = vec![None; formula.var_count()];
    for line in solver_output.lines() {
        let line = line.trim();
        if let Some(rest) = line.strip_prefix("s ") {
            status = Some(rest.trim().to_string());
        } else if let Some(rest) = line.strip_prefix('v') {
            for tok in rest.split_whitespace() {
                let lit: i64 = tok.parse().map_err(|_| ModelError::BadToken(tok.to_string()))?;
                if lit == 0 {
                    continue;
                }
                let var = lit.unsigned_abs() as usize;
                if var <= values.len() {
                    values[var - 1] = Some(lit > 0);
                }
            }
        }
    }
    match status.as_deref() {
        Some("UNSATISFIABLE") => Ok(SolverAnswer::Unsat),
        Some("UNKNOWN") => Ok(SolverAnswer::Unknown),
        Some("SATISFIABLE") => {
            let mut full = Vec::with_capacity(values.len());
            for (i, v) in values.into_iter().enumerate() {
                full.push(v.ok_or(ModelError::IncompleteModel(i as u32 + 1))?);
            }
            let assignment = Assignment(full);
            if let Some(c) = formula.first_violated(&assignment) {
                return Err(ModelError::ViolatedClause(c));
            }
            Ok(SolverAnswer::Sat(assignment))
        }
        _ => Err(ModelError::MalformedOutput),
    }
}

use thiserror::Error;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DimacsFormula {
    pub num_vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("missing or malformed `p cnf` header")]
    BadHeader,
    #[error("line {line}: bad literal {token:?}")]
    BadLiteral { line: usize, token: String },
    #[error("literal {lit} exceeds the declared {vars} variables")]
    VarOutOfRange { lit: i32, vars: usize },
    #[error("declared {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
}

/// Reads DIMACS CNF. Comment lines start with `c`; clauses may span lines.
pub fn parse_dimacs(text: &str) -> Result<DimacsFormula, DimacsError> {
    let mut header = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if line.starts_with('p') {
            let parts: Vec<&str> = line.split_whitespace().collect();
            match parts.as_slice() {
                ["p", "cnf", v, c] => {
                    let v = v.parse().map_err(|_| DimacsError::BadHeader)?;
                    let c = c.parse().map_err(|_| DimacsError::BadHeader)?;
                    header = Some((v, c));
                }
                _ => return Err(DimacsError::BadHeader),
            }
            continue;
        }
        let (vars, _) = header.ok_or(DimacsError::BadHeader)?;
        for tok in line.split_whitespace() {
            let lit: i32 = tok
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line: n + 1, token: tok.to_string() })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
            } else {
                if lit.unsigned_abs() as usize > vars {
                    return Err(DimacsError::VarOutOfRange { lit, vars });
                }
                current.push(lit);
            }
        }
    }
    let (num_vars, declared) = header.ok_or(DimacsError::BadHeader)?;
    if !current.is_empty() {
        clauses.push(current);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    Ok(DimacsFormula { num_vars, clauses })
}

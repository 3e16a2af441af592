//! A compact CDCL SAT solver.
//!
//! Two watched literals, first-UIP learning with local clause minimisation,
//! VSIDS branching with phase saving, Luby restarts and activity-based
//! learnt clause deletion. Literals use the DIMACS convention at the API
//! boundary (`+v` / `-v`, variables numbered from 1).

mod dimacs;

pub use dimacs::{parse_dimacs, DimacsError, DimacsFormula};

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveResult {
    /// `model[v - 1]` is the value of DIMACS variable `v`.
    Sat(Vec<bool>),
    Unsat,
    /// Deadline passed or interrupted.
    Unknown,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
struct Lit(u32);

impl Lit {
    fn from_dimacs(x: i32) -> Lit {
        let v = x.unsigned_abs() - 1;
        Lit(2 * v + u32::from(x < 0))
    }

    fn var(self) -> usize {
        (self.0 >> 1) as usize
    }

    fn neg(self) -> Lit {
        Lit(self.0 ^ 1)
    }

    fn is_neg(self) -> bool {
        self.0 & 1 == 1
    }

    fn idx(self) -> usize {
        self.0 as usize
    }
}

const UNDEF: u8 = 2;

#[derive(Debug, Clone, Copy)]
struct Watcher {
    cref: usize,
    blocker: Lit,
}

#[derive(Debug)]
struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    deleted: bool,
    activity: f64,
}

/// Indexed binary max-heap over variable activities.
#[derive(Debug, Default)]
struct VarHeap {
    heap: Vec<usize>,
    pos: Vec<Option<usize>>,
}

impl VarHeap {
    fn contains(&self, v: usize) -> bool {
        self.pos[v].is_some()
    }

    fn insert(&mut self, v: usize, act: &[f64]) {
        if self.contains(v) {
            return;
        }
        self.pos[v] = Some(self.heap.len());
        self.heap.push(v);
        self.up(self.heap.len() - 1, act);
    }

    fn pop(&mut self, act: &[f64]) -> Option<usize> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().unwrap();
        self.pos[top] = None;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last] = Some(0);
            self.down(0, act);
        }
        Some(top)
    }

    fn bumped(&mut self, v: usize, act: &[f64]) {
        if let Some(i) = self.pos[v] {
            self.up(i, act);
        }
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent]] >= act[v] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i]] = Some(i);
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let child = if r < self.heap.len() && act[self.heap[r]] > act[self.heap[l]] { r } else { l };
            if act[self.heap[child]] <= act[v] {
                break;
            }
            self.heap[i] = self.heap[child];
            self.pos[self.heap[i]] = Some(i);
            i = child;
        }
        self.heap[i] = v;
        self.pos[v] = Some(i);
    }
}

#[derive(Debug)]
pub struct Solver {
    num_vars: usize,
    clauses: Vec<Clause>,
    learnts: Vec<usize>,
    watches: Vec<Vec<Watcher>>,
    assigns: Vec<u8>,
    level: Vec<u32>,
    reason: Vec<Option<usize>>,
    phase: Vec<bool>,
    activity: Vec<f64>,
    var_inc: f64,
    cla_inc: f64,
    heap: VarHeap,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    seen: Vec<bool>,
    inconsistent: bool,
    deadline: Option<Instant>,
    interrupt: Option<Arc<AtomicBool>>,
    pub stats: Stats,
}

#[derive(Debug, Default, Clone, Copy)]
pub struct Stats {
    pub conflicts: u64,
    pub decisions: u64,
    pub propagations: u64,
    pub restarts: u64,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new()
    }
}

impl Solver {
    pub fn new() -> Solver {
        Solver {
            num_vars: 0,
            clauses: Vec::new(),
            learnts: Vec::new(),
            watches: Vec::new(),
            assigns: Vec::new(),
            level: Vec::new(),
            reason: Vec::new(),
            phase: Vec::new(),
            activity: Vec::new(),
            var_inc: 1.0,
            cla_inc: 1.0,
            heap: VarHeap::default(),
            trail: Vec::new(),
            trail_lim: Vec::new(),
            qhead: 0,
            seen: Vec::new(),
            inconsistent: false,
            deadline: None,
            interrupt: None,
            stats: Stats::default(),
        }
    }

    pub fn from_dimacs(formula: &DimacsFormula) -> Solver {
        let mut s = Solver::new();
        s.reserve_vars(formula.num_vars);
        for c in &formula.clauses {
            s.add_clause(c);
        }
        s
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn set_deadline(&mut self, deadline: Option<Instant>) {
        self.deadline = deadline;
    }

    /// Flag polled during search; setting it makes `solve` return `Unknown`.
    pub fn set_interrupt(&mut self, flag: Arc<AtomicBool>) {
        self.interrupt = Some(flag);
    }

    pub fn reserve_vars(&mut self, n: usize) {
        while self.num_vars < n {
            let v = self.num_vars;
            self.num_vars += 1;
            self.watches.push(Vec::new());
            self.watches.push(Vec::new());
            self.assigns.push(UNDEF);
            self.level.push(0);
            self.reason.push(None);
            self.phase.push(false);
            self.activity.push(0.0);
            self.seen.push(false);
            self.heap.pos.push(None);
            self.heap.insert(v, &self.activity);
        }
    }

    fn value(&self, l: Lit) -> u8 {
        let a = self.assigns[l.var()];
        if a == UNDEF { UNDEF } else { a ^ u8::from(l.is_neg()) }
    }

    fn decision_level(&self) -> u32 {
        self.trail_lim.len() as u32
    }

    /// Adds a clause of DIMACS literals. Must be called before `solve`.
    pub fn add_clause(&mut self, dimacs: &[i32]) {
        if self.inconsistent {
            return;
        }
        assert!(self.trail_lim.is_empty(), "clauses are added at decision level 0");
        let max = dimacs.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0);
        self.reserve_vars(max);
        let mut lits: Vec<Lit> = dimacs.iter().map(|&x| Lit::from_dimacs(x)).collect();
        lits.sort_unstable();
        lits.dedup();
        if lits.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        if lits.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        lits.retain(|&l| self.value(l) != 0);
        match lits.len() {
            0 => self.inconsistent = true,
            1 => {
                self.enqueue(lits[0], None);
                if self.propagate().is_some() {
                    self.inconsistent = true;
                }
            }
            _ => {
                self.attach(lits, false);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool) -> usize {
        let cref = self.clauses.len();
        self.watches[lits[0].idx()].push(Watcher { cref, blocker: lits[1] });
        self.watches[lits[1].idx()].push(Watcher { cref, blocker: lits[0] });
        self.clauses.push(Clause { lits, learnt, deleted: false, activity: 0.0 });
        if learnt {
            self.learnts.push(cref);
        }
        cref
    }

    fn enqueue(&mut self, l: Lit, reason: Option<usize>) {
        let v = l.var();
        self.assigns[v] = u8::from(!l.is_neg());
        self.level[v] = self.decision_level();
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Unit propagation; returns a conflicting clause.
    fn propagate(&mut self) -> Option<usize> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            self.stats.propagations += 1;
            let false_lit = p.neg();
            let mut ws = std::mem::take(&mut self.watches[false_lit.idx()]);
            let (mut i, mut j) = (0, 0);
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let clause = &mut self.clauses[w.cref];
                if clause.deleted {
                    continue;
                }
                if clause.lits[0] == false_lit {
                    clause.lits.swap(0, 1);
                }
                let first = clause.lits[0];
                let first_val = {
                    let a = self.assigns[first.var()];
                    if a == UNDEF { UNDEF } else { a ^ u8::from(first.is_neg()) }
                };
                if first != w.blocker && first_val == 1 {
                    ws[j] = Watcher { cref: w.cref, blocker: first };
                    j += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.lits.len() {
                    let l = clause.lits[k];
                    let a = self.assigns[l.var()];
                    if a == UNDEF || a ^ u8::from(l.is_neg()) == 1 {
                        clause.lits.swap(1, k);
                        let new_watch = clause.lits[1];
                        self.watches[new_watch.idx()].push(Watcher { cref: w.cref, blocker: first });
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                ws[j] = w;
                j += 1;
                if first_val == 0 {
                    conflict = Some(w.cref);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.enqueue(first, Some(w.cref));
                }
            }
            ws.truncate(j);
            self.watches[false_lit.idx()] = ws;
            if conflict.is_some() {
                self.qhead = self.trail.len();
                return conflict;
            }
        }
        None
    }

    fn bump_var(&mut self, v: usize) {
        self.activity[v] += self.var_inc;
        if self.activity[v] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        self.heap.bumped(v, &self.activity);
    }

    fn bump_clause(&mut self, cref: usize) {
        let c = &mut self.clauses[cref];
        c.activity += self.cla_inc;
        if c.activity > 1e20 {
            for &r in &self.learnts {
                self.clauses[r].activity *= 1e-20;
            }
            self.cla_inc *= 1e-20;
        }
    }

    fn analyze(&mut self, mut confl: usize) -> (Vec<Lit>, u32) {
        let mut learnt = vec![Lit(0)];
        let mut path = 0;
        let mut p: Option<Lit> = None;
        let mut idx = self.trail.len();
        loop {
            if self.clauses[confl].learnt {
                self.bump_clause(confl);
            }
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl].lits.len() {
                let q = self.clauses[confl].lits[k];
                let v = q.var();
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump_var(v);
                    if self.level[v] >= self.decision_level() {
                        path += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                idx -= 1;
                if self.seen[self.trail[idx].var()] {
                    break;
                }
            }
            let lit = self.trail[idx];
            p = Some(lit);
            self.seen[lit.var()] = false;
            path -= 1;
            if path == 0 {
                break;
            }
            confl = self.reason[lit.var()].expect("implied literal has a reason");
        }
        learnt[0] = p.unwrap().neg();

        // Drop literals implied by the rest of the clause.
        let before = learnt.clone();
        let mut keep = vec![learnt[0]];
        for &l in &learnt[1..] {
            let redundant = match self.reason[l.var()] {
                None => false,
                Some(r) => self.clauses[r].lits[1..]
                    .iter()
                    .all(|q| self.seen[q.var()] || self.level[q.var()] == 0),
            };
            if !redundant {
                keep.push(l);
            }
        }
        for l in &before {
            self.seen[l.var()] = false;
        }
        let mut learnt = keep;

        let back = if learnt.len() == 1 {
            0
        } else {
            let (mut best, mut lvl) = (1, self.level[learnt[1].var()]);
            for (k, l) in learnt.iter().enumerate().skip(2) {
                if self.level[l.var()] > lvl {
                    best = k;
                    lvl = self.level[l.var()];
                }
            }
            learnt.swap(1, best);
            lvl
        };
        (learnt, back)
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.decision_level() <= lvl {
            return;
        }
        let lim = self.trail_lim[lvl as usize];
        for k in (lim..self.trail.len()).rev() {
            let l = self.trail[k];
            let v = l.var();
            self.phase[v] = !l.is_neg();
            self.assigns[v] = UNDEF;
            self.reason[v] = None;
            self.heap.insert(v, &self.activity);
        }
        self.trail.truncate(lim);
        self.trail_lim.truncate(lvl as usize);
        self.qhead = lim;
    }

    fn pick_branch(&mut self) -> Option<Lit> {
        while let Some(v) = self.heap.pop(&self.activity) {
            if self.assigns[v] == UNDEF {
                return Some(Lit(2 * v as u32 + u32::from(!self.phase[v])));
            }
        }
        None
    }

    fn locked(&self, cref: usize) -> bool {
        let first = self.clauses[cref].lits[0];
        self.value(first) == 1 && self.reason[first.var()] == Some(cref)
    }

    fn reduce_db(&mut self) {
        let mut learnts = std::mem::take(&mut self.learnts);
        learnts.sort_by(|&a, &b| self.clauses[a].activity.total_cmp(&self.clauses[b].activity));
        let half = learnts.len() / 2;
        let mut kept = Vec::with_capacity(learnts.len());
        for (k, cref) in learnts.into_iter().enumerate() {
            let c = &self.clauses[cref];
            if k < half && c.lits.len() > 2 && !self.locked(cref) {
                let c = &mut self.clauses[cref];
                c.deleted = true;
                c.lits = Vec::new();
            } else {
                kept.push(cref);
            }
        }
        self.learnts = kept;
    }

    fn out_of_budget(&self) -> bool {
        if let Some(flag) = &self.interrupt {
            if flag.load(Ordering::Relaxed) {
                return true;
            }
        }
        matches!(self.deadline, Some(d) if Instant::now() >= d)
    }

    pub fn solve(&mut self) -> SolveResult {
        if self.inconsistent {
            return SolveResult::Unsat;
        }
        if self.propagate().is_some() {
            self.inconsistent = true;
            return SolveResult::Unsat;
        }
        let mut max_learnts = (self.clauses.len() as f64 / 3.0).max(2000.0);
        let mut restart = 0u32;
        loop {
            let budget = luby(restart) * 100;
            match self.search(budget, &mut max_learnts) {
                Some(r) => return r,
                None => {
                    restart += 1;
                    self.stats.restarts += 1;
                    if self.out_of_budget() {
                        self.cancel_until(0);
                        return SolveResult::Unknown;
                    }
                }
            }
        }
    }

    fn search(&mut self, budget: u64, max_learnts: &mut f64) -> Option<SolveResult> {
        let mut conflicts = 0;
        loop {
            if let Some(confl) = self.propagate() {
                self.stats.conflicts += 1;
                conflicts += 1;
                if self.decision_level() == 0 {
                    self.inconsistent = true;
                    return Some(SolveResult::Unsat);
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.enqueue(learnt[0], None);
                } else {
                    let first = learnt[0];
                    let cref = self.attach(learnt, true);
                    self.bump_clause(cref);
                    self.enqueue(first, Some(cref));
                }
                self.var_inc /= 0.95;
                self.cla_inc /= 0.999;
                if conflicts % 256 == 0 && self.out_of_budget() {
                    self.cancel_until(0);
                    return Some(SolveResult::Unknown);
                }
            } else {
                if conflicts >= budget {
                    self.cancel_until(0);
                    return None;
                }
                if self.learnts.len() as f64 - self.trail.len() as f64 >= *max_learnts {
                    self.reduce_db();
                    *max_learnts *= 1.1;
                }
                match self.pick_branch() {
                    None => {
                        let model = (0..self.num_vars).map(|v| self.assigns[v] == 1).collect();
                        self.cancel_until(0);
                        return Some(SolveResult::Sat(model));
                    }
                    Some(lit) => {
                        self.stats.decisions += 1;
                        self.trail_lim.push(self.trail.len());
                        self.enqueue(lit, None);
                    }
                }
            }
        }
    }
}

/// Luby sequence 1 1 2 1 1 2 4 ... indexed from 0.
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    while size < u64::from(i) + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = u64::from(i);
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1u64 << seq
}

/// Convenience: solve a clause list over `num_vars` variables.
pub fn solve_clauses(num_vars: usize, clauses: &[Vec<i32>]) -> SolveResult {
    let mut s = Solver::new();
    s.reserve_vars(num_vars);
    for c in clauses {
        s.add_clause(c);
    }
    s.solve()
}

/// Writes a result in SAT-competition output format.
pub fn competition_output(result: &SolveResult) -> String {
    match result {
        SolveResult::Unsat => "s UNSATISFIABLE\n".to_string(),
        SolveResult::Unknown => "s UNKNOWN\n".to_string(),
        SolveResult::Sat(model) => {
            let mut out = String::from("s SATISFIABLE\n");
            let mut line = String::from("v");
            for (i, &b) in model.iter().enumerate() {
                let lit = if b { (i + 1) as i64 } else { -((i + 1) as i64) };
                let tok = format!(" {lit}");
                if line.len() + tok.len() > 78 {
                    out.push_str(&line);
                    out.push('\n');
                    line = String::from("v");
                }
                line.push_str(&tok);
            }
            line.push_str(" 0\n");
            out.push_str(&line);
            out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn luby_prefix() {
        let seq: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(seq, vec![1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn trivial_cases() {
        assert_eq!(solve_clauses(0, &[]), SolveResult::Sat(vec![]));
        assert_eq!(solve_clauses(1, &[vec![1], vec![-1]]), SolveResult::Unsat);
        assert_eq!(solve_clauses(2, &[vec![1, 2], vec![-1], vec![-2, 1]]), SolveResult::Unsat);
        assert_eq!(solve_clauses(2, &[vec![1, -2]]), SolveResult::Sat(vec![false, false]));
    }

    #[test]
    fn competition_format() {
        assert_eq!(competition_output(&SolveResult::Unsat), "s UNSATISFIABLE\n");
        assert_eq!(competition_output(&SolveResult::Sat(vec![true, false])), "s SATISFIABLE\nv 1 -2 0\n");
    }
}

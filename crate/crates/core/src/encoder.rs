//! Planning-as-SAT encodings of the game.
//!
//! A formula for horizon `T` has one copy of the state variables per time
//! step `0..=T` and one action per step `0..T`:
//!
//! * `basic` uses the four direction actions; walks count toward `T`.
//! * `cheating`, `reach-order` and `reach-count` use ball actions
//!   `a[l,d]` ("push the ball at `l` towards `d`"), so `T` counts ball moves.
//!   `cheating` lets the character teleport to the push position, the two
//!   `reach-*` variants require a walk to it, certified by a reachability
//!   path encoded with a strict partial order (`reach-order`) or with
//!   neighbour counting on the grid (`reach-count`).
//!
//! Transitions are written as exact conditional effects on the two cells an
//! action touches, and frame axioms forbid every other change.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cnf::{Assignment, CnfFormula, ExactlyOneMethod, Lit, VarId};
use crate::level::{BallSize, Direction, Level, Location};
use crate::oracle::{self, BallAction, ExpandError};
use crate::sim::{Move, Plan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Basic,
    Cheating,
    ReachOrder,
    ReachCount,
}

impl Variant {
    pub const ALL: [Variant; 4] = [Variant::Basic, Variant::Cheating, Variant::ReachOrder, Variant::ReachCount];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Basic => "basic",
            Variant::Cheating => "cheating",
            Variant::ReachOrder => "reach-order",
            Variant::ReachCount => "reach-count",
        }
    }

    /// Whether the horizon counts ball moves (all variants except `basic`).
    pub fn counts_ball_moves(self) -> bool {
        self != Variant::Basic
    }

    pub fn certifies_paths(self) -> bool {
        matches!(self, Variant::ReachOrder | Variant::ReachCount)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown encoding {0:?} (expected basic, cheating, reach-order or reach-count)")]
pub struct UnknownVariant(pub String);

impl FromStr for Variant {
    type Err = UnknownVariant;

    fn from_str(s: &str) -> Result<Variant, UnknownVariant> {
        match s.to_ascii_lowercase().as_str() {
            "basic" | "sat" => Ok(Variant::Basic),
            "cheating" | "sat-cheating" => Ok(Variant::Cheating),
            "reach-order" | "sat-r-order" => Ok(Variant::ReachOrder),
            "reach-count" | "sat-r-count" => Ok(Variant::ReachCount),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncodingSpec {
    pub variant: Variant,
    pub horizon: usize,
    pub invariants: bool,
}

impl EncodingSpec {
    pub fn new(variant: Variant, horizon: usize) -> Self {
        EncodingSpec { variant, horizon, invariants: false }
    }

    pub fn with_invariants(mut self, on: bool) -> Self {
        self.invariants = on;
        self
    }
}

/// Per-step reachability variables.
#[derive(Debug, Clone)]
pub enum ReachVars {
    None,
    Order {
        reach: Vec<VarId>,
        /// Directed edge variables keyed by `(from, to)` location indices.
        edges: Vec<((usize, usize), VarId)>,
        /// `order[i * n + k]` for `i != k`.
        order: Vec<Option<VarId>>,
    },
    Count {
        path: Vec<VarId>,
        target: Vec<VarId>,
    },
}

/// Where every variable of an encoding lives.
#[derive(Debug, Clone)]
pub struct VarLayout {
    pub locations: Vec<Location>,
    pub horizon: usize,
    /// `[t][l]`
    pub snow: Vec<Vec<VarId>>,
    /// `[t][l][size]`
    pub balls: Vec<Vec<[VarId; 3]>>,
    pub character: Vec<Vec<VarId>>,
    pub occupied: Vec<Vec<VarId>>,
    /// Two or more balls on the cell.
    pub stacked: Vec<Vec<VarId>>,
    /// `[t][dir]`, basic variant only.
    pub directions: Vec<[VarId; 4]>,
    /// `[t][l * 4 + dir]`: ball actions, or the derived ball moves of `basic`.
    pub ball_actions: Vec<Vec<Option<VarId>>>,
    /// `[t]`, defined for `t < T`.
    pub reach: Vec<ReachVars>,
}

impl VarLayout {
    pub fn action(&self, t: usize, l: usize, dir: Direction) -> Option<VarId> {
        self.ball_actions[t][l * 4 + dir.index()]
    }
}

#[derive(Debug, Clone)]
pub struct Encoding {
    pub spec: EncodingSpec,
    pub formula: CnfFormula,
    pub layout: VarLayout,
}

/// Precomputed neighbourhood over location indices.
struct Grid {
    locations: Vec<Location>,
    /// `[l][dir]`
    next: Vec<[Option<usize>; 4]>,
}

impl Grid {
    fn new(level: &Level) -> Grid {
        let locations = level.valid_locations().to_vec();
        let next = locations
            .iter()
            .map(|&loc| Direction::ALL.map(|d| level.neighbor(loc, d).and_then(|n| level.index_of(n))))
            .collect();
        Grid { locations, next }
    }

    fn n(&self) -> usize {
        self.locations.len()
    }

    fn step(&self, l: usize, d: Direction) -> Option<usize> {
        self.next[l][d.index()]
    }

    fn neighbors(&self, l: usize) -> impl Iterator<Item = usize> + '_ {
        self.next[l].iter().flatten().copied()
    }
}

fn tag(loc: Location) -> String {
    format!("r{}c{}", loc.row, loc.col)
}

fn dir_tag(d: Direction) -> char {
    d.letter().to_ascii_uppercase()
}

fn size_tag(s: BallSize) -> &'static str {
    match s {
        BallSize::Small => "bs",
        BallSize::Medium => "bm",
        BallSize::Large => "bl",
    }
}

fn var(f: &mut CnfFormula, name: String) -> VarId {
    f.new_var(name).expect("encoder variable names are unique")
}

/// `ante → exactly k of xs`, by subset enumeration (xs has at most four entries).
fn implied_exactly(f: &mut CnfFormula, ante: &[Lit], xs: &[Lit], k: usize) {
    let negated_ante: Vec<Lit> = ante.iter().map(|l| !*l).collect();
    let m = xs.len();
    for mask in 0u32..1 << m {
        let ones = mask.count_ones() as usize;
        let chosen: Vec<Lit> = (0..m).filter(|i| mask >> i & 1 == 1).map(|i| xs[i]).collect();
        if ones == k + 1 {
            // not all of these true
            f.add_clause(negated_ante.iter().copied().chain(chosen.iter().map(|x| !*x)));
        }
        if m >= k && ones == m - k + 1 {
            // at least one of these true
            f.add_clause(negated_ante.iter().copied().chain(chosen));
        }
    }
    if m < k {
        f.add_clause(negated_ante);
    }
}

struct Builder<'a> {
    level: &'a Level,
    grid: Grid,
    spec: EncodingSpec,
    f: CnfFormula,
    lay: VarLayout,
}

pub fn encode(level: &Level, spec: EncodingSpec) -> Encoding {
    let grid = Grid::new(level);
    let lay = VarLayout {
        locations: grid.locations.clone(),
        horizon: spec.horizon,
        snow: Vec::new(),
        balls: Vec::new(),
        character: Vec::new(),
        occupied: Vec::new(),
        stacked: Vec::new(),
        directions: Vec::new(),
        ball_actions: Vec::new(),
        reach: Vec::new(),
    };
    let mut b = Builder { level, grid, spec, f: CnfFormula::new(), lay };
    b.state_vars();
    b.initial_state();
    b.goal();
    for t in 0..spec.horizon {
        match spec.variant {
            Variant::Basic => b.basic_step(t),
            _ => b.ball_action_step(t),
        }
        b.frame_axioms(t);
    }
    if spec.invariants {
        b.invariants();
    }
    Encoding { spec, formula: b.f, layout: b.lay }
}

impl Builder<'_> {
    fn state_vars(&mut self) {
        let n = self.grid.n();
        for t in 0..=self.spec.horizon {
            let mut snow = Vec::with_capacity(n);
            let mut balls = Vec::with_capacity(n);
            let mut chr = Vec::with_capacity(n);
            let mut occ = Vec::with_capacity(n);
            let mut stk = Vec::with_capacity(n);
            for l in 0..n {
                let at = tag(self.grid.locations[l]);
                snow.push(var(&mut self.f, format!("s@{at}@t{t}")));
                balls.push(BallSize::ALL.map(|s| var(&mut self.f, format!("{}@{at}@t{t}", size_tag(s)))));
                chr.push(var(&mut self.f, format!("c@{at}@t{t}")));
                occ.push(var(&mut self.f, format!("occ@{at}@t{t}")));
                stk.push(var(&mut self.f, format!("stk@{at}@t{t}")));
            }
            for l in 0..n {
                let [bs, bm, bl] = balls[l].map(VarId::pos);
                let (o, u, c, s) = (occ[l].pos(), stk[l].pos(), chr[l].pos(), snow[l].pos());
                // occ ↔ bs ∨ bm ∨ bl
                self.f.add_clause([!o, bs, bm, bl]);
                for b in [bs, bm, bl] {
                    self.f.add_clause([!b, o]);
                }
                // stk ↔ at least two balls
                self.f.add_clause([!u, bs, bm]);
                self.f.add_clause([!u, bs, bl]);
                self.f.add_clause([!u, bm, bl]);
                self.f.add_clause([!bs, !bm, u]);
                self.f.add_clause([!bs, !bl, u]);
                self.f.add_clause([!bm, !bl, u]);
                // balls never sit on snow, the character never shares a cell with a ball
                self.f.add_clause([!o, !s]);
                self.f.add_clause([!c, !o]);
            }
            let chars: Vec<Lit> = chr.iter().map(|v| v.pos()).collect();
            self.f.exactly_one(&chars, ExactlyOneMethod::Auto);
            self.lay.snow.push(snow);
            self.lay.balls.push(balls);
            self.lay.character.push(chr);
            self.lay.occupied.push(occ);
            self.lay.stacked.push(stk);
        }
    }

    fn initial_state(&mut self) {
        for (l, &loc) in self.grid.locations.iter().enumerate() {
            let snow = self.lay.snow[0][l];
            self.f.add_unit(if self.level.has_initial_snow(loc) { snow.pos() } else { snow.neg() });
            let set = self.level.stacks().get(&loc).copied().unwrap_or_default();
            for s in BallSize::ALL {
                let b = self.lay.balls[0][l][s.index()];
                self.f.add_unit(if set.contains(s) { b.pos() } else { b.neg() });
            }
            let c = self.lay.character[0][l];
            self.f.add_unit(if loc == self.level.character() { c.pos() } else { c.neg() });
        }
    }

    /// Every cell holds either no ball or all three sizes.
    fn goal(&mut self) {
        let t = self.spec.horizon;
        for l in 0..self.grid.n() {
            let [bs, bm, bl] = self.lay.balls[t][l].map(VarId::pos);
            self.f.add_clause([!bs, bm]);
            self.f.add_clause([bs, !bm]);
            self.f.add_clause([!bm, bl]);
            self.f.add_clause([bm, !bl]);
        }
    }

    fn ball(&self, t: usize, l: usize, s: BallSize) -> Lit {
        self.lay.balls[t][l][s.index()].pos()
    }

    /// Literals stating that `size` is the top (smallest) ball at `l`.
    fn top_is(&self, t: usize, l: usize, size: BallSize) -> Vec<Lit> {
        let mut lits = vec![self.ball(t, l, size)];
        for smaller in BallSize::ALL.into_iter().filter(|s| *s < size) {
            lits.push(!self.ball(t, l, smaller));
        }
        lits
    }

    /// Preconditions and effects of moving the top ball at `l` one cell in
    /// `d`, with the character pushing from `l - d`. `act` is the action
    /// literal (a ball action, or the derived ball move of `basic`).
    fn ball_move(&mut self, t: usize, act: Lit, l: usize, d: Direction) {
        let g = self.grid.step(l, d).expect("ball move needs a destination");
        let p = self.grid.step(l, d.inverse()).expect("ball move needs a push position");
        let (occ, stk) = (&self.lay.occupied, &self.lay.stacked);
        let (occ_l, occ_p, occ_g, stk_l) = (occ[t][l].pos(), occ[t][p].pos(), occ[t][g].pos(), stk[t][l].pos());
        let snow_g = self.lay.snow[t][g].pos();
        let f = &mut self.f;

        f.add_implication(&[act], &[occ_l]);
        f.add_implication(&[act], &[!occ_p]);
        // A ball leaving a stack cannot land on a stack.
        f.add_implication(&[act, stk_l, occ_g], &[]);
        // A single ball lands only on strictly bigger balls.
        for m in BallSize::ALL {
            for x in BallSize::ALL.into_iter().filter(|x| *x <= m) {
                let (bm, bx) = (self.lay.balls[t][l][m.index()].pos(), self.lay.balls[t][g][x.index()].pos());
                self.f.add_implication(&[act, bm, bx], &[]);
            }
        }

        // Source cell loses exactly its top ball.
        for j in BallSize::ALL {
            let now = self.ball(t, l, j);
            let next = self.ball(t + 1, l, j);
            self.f.add_implication(&[act, next], &[now]);
            let smaller: Vec<Lit> = BallSize::ALL.into_iter().filter(|i| *i < j).map(|i| self.ball(t, l, i)).collect();
            self.f.add_implication(&[act, next], &smaller);
            for s in smaller {
                self.f.add_implication(&[act, now, s], &[next]);
            }
        }

        // Destination keeps its balls and gains the moved one, grown on snow.
        for j in BallSize::ALL {
            let (now, next) = (self.ball(t, g, j), self.ball(t + 1, g, j));
            self.f.add_implication(&[act, now], &[next]);
        }
        for m in BallSize::ALL {
            let top = self.top_is(t, l, m);
            for snowy in [false, true] {
                let arrived = if snowy { m.grow() } else { m };
                let snow_lit = if snowy { snow_g } else { !snow_g };
                let mut ante = vec![act, snow_lit];
                ante.extend(&top);
                let arrived_lit = self.ball(t + 1, g, arrived);
                self.f.add_implication(&ante, &[arrived_lit]);
                for j in BallSize::ALL.into_iter().filter(|j| *j != arrived) {
                    let (now, next) = (self.ball(t, g, j), self.ball(t + 1, g, j));
                    let mut a = ante.clone();
                    a.push(next);
                    self.f.add_implication(&a, &[now]);
                }
            }
        }
        let snow_next = self.lay.snow[t + 1][g].pos();
        self.f.add_implication(&[act], &[!snow_next]);

        // Roll and push move the character onto the vacated cell, pop leaves it in place.
        let (c_l, c_p) = (self.lay.character[t + 1][l].pos(), self.lay.character[t + 1][p].pos());
        self.f.add_implication(&[act, !stk_l], &[c_l]);
        self.f.add_implication(&[act, stk_l], &[c_p]);
    }

    fn basic_step(&mut self, t: usize) {
        let n = self.grid.n();
        let dirs = Direction::ALL.map(|d| var(&mut self.f, format!("dir@{}@t{t}", dir_tag(d))));
        let dir_lits: Vec<Lit> = dirs.iter().map(|v| v.pos()).collect();
        self.f.exactly_one(&dir_lits, ExactlyOneMethod::Pairwise);
        let mut moves = vec![None; n * 4];

        for l in 0..n {
            let c = self.lay.character[t][l].pos();
            for d in Direction::ALL {
                let go = dirs[d.index()].pos();
                let Some(front) = self.grid.step(l, d) else {
                    // wall ahead
                    self.f.add_implication(&[c, go], &[]);
                    continue;
                };
                let occ_f = self.lay.occupied[t][front].pos();
                let c_front = self.lay.character[t + 1][front].pos();
                self.f.add_implication(&[c, go, !occ_f], &[c_front]);
                if self.grid.step(front, d).is_none() {
                    // wall two ahead: only a walk is possible
                    self.f.add_implication(&[c, go], &[!occ_f]);
                    continue;
                }
                let mv = var(&mut self.f, format!("m@{}@{}@t{t}", tag(self.grid.locations[front]), dir_tag(d)));
                let m = mv.pos();
                self.f.add_implication(&[m], &[go]);
                self.f.add_implication(&[m], &[c]);
                self.f.add_implication(&[m], &[occ_f]);
                self.f.add_implication(&[go, c, occ_f], &[m]);
                self.ball_move(t, m, front, d);
                moves[front * 4 + d.index()] = Some(mv);
            }
        }
        self.lay.directions.push(dirs);
        self.lay.ball_actions.push(moves);
        self.lay.reach.push(ReachVars::None);
    }

    fn ball_action_step(&mut self, t: usize) {
        let n = self.grid.n();
        let mut actions = vec![None; n * 4];
        for l in 0..n {
            for d in Direction::ALL {
                if self.grid.step(l, d).is_some() && self.grid.step(l, d.inverse()).is_some() {
                    let name = format!("a@{}@{}@t{t}", tag(self.grid.locations[l]), dir_tag(d));
                    actions[l * 4 + d.index()] = Some(var(&mut self.f, name));
                }
            }
        }
        let lits: Vec<Lit> = actions.iter().flatten().map(|v| v.pos()).collect();
        if lits.is_empty() {
            // No ball can ever move on this grid.
            self.f.add_clause([]);
        } else {
            self.f.exactly_one(&lits, ExactlyOneMethod::Auto);
        }
        for l in 0..n {
            for d in Direction::ALL {
                if let Some(a) = actions[l * 4 + d.index()] {
                    self.ball_move(t, a.pos(), l, d);
                }
            }
        }
        self.lay.ball_actions.push(actions);
        let reach = match self.spec.variant {
            Variant::ReachOrder => self.reach_order(t),
            Variant::ReachCount => self.reach_count(t),
            _ => ReachVars::None,
        };
        self.lay.reach.push(reach);
    }

    /// Actions whose push position is `p`.
    fn actions_from(&self, t: usize, p: usize) -> Vec<Lit> {
        Direction::ALL
            .into_iter()
            .filter_map(|d| self.grid.step(p, d).and_then(|l| self.lay.action(t, l, d)))
            .map(|v| v.pos())
            .collect()
    }

    fn reach_order(&mut self, t: usize) -> ReachVars {
        let n = self.grid.n();
        let locs = self.grid.locations.clone();
        let reach: Vec<VarId> = (0..n).map(|l| var(&mut self.f, format!("r@{}@t{t}", tag(locs[l])))).collect();
        let mut order = vec![None; n * n];
        for i in 0..n {
            for k in 0..n {
                if i != k {
                    order[i * n + k] = Some(var(&mut self.f, format!("p@{}<{}@t{t}", tag(locs[i]), tag(locs[k]))));
                }
            }
        }
        let ord = |i: usize, k: usize| order[i * n + k].expect("off-diagonal order variable").pos();
        let mut edges = Vec::new();
        let mut incoming: Vec<Vec<Lit>> = vec![Vec::new(); n];
        for l in 0..n {
            for l2 in self.grid.neighbors(l).collect::<Vec<_>>() {
                let e = var(&mut self.f, format!("e@{}>{}@t{t}", tag(locs[l]), tag(locs[l2])));
                self.f.add_implication(&[e.pos()], &[reach[l].pos()]);
                self.f.add_implication(&[e.pos()], &[ord(l, l2)]);
                incoming[l2].push(e.pos());
                edges.push(((l, l2), e));
            }
        }
        for l in 0..n {
            let mut support = vec![self.lay.character[t][l].pos()];
            support.extend(&incoming[l]);
            self.f.add_implication(&[reach[l].pos()], &support);
            let occ = self.lay.occupied[t][l].pos();
            self.f.add_implication(&[occ], &[!reach[l].pos()]);
        }
        // Transitivity through adjacent middle elements; i = k gives antisymmetry.
        for i in 0..n {
            for j in self.grid.neighbors(i).collect::<Vec<_>>() {
                for k in 0..n {
                    if k == j {
                        continue;
                    }
                    if k == i {
                        self.f.add_clause([!ord(i, j), !ord(j, i)]);
                    } else {
                        self.f.add_implication(&[ord(i, j), ord(j, k)], &[ord(i, k)]);
                    }
                }
            }
        }
        for p in 0..n {
            for a in self.actions_from(t, p) {
                self.f.add_implication(&[a], &[reach[p].pos()]);
            }
        }
        ReachVars::Order { reach, edges, order }
    }

    fn reach_count(&mut self, t: usize) -> ReachVars {
        let n = self.grid.n();
        let locs = self.grid.locations.clone();
        let path: Vec<VarId> = (0..n).map(|l| var(&mut self.f, format!("pth@{}@t{t}", tag(locs[l])))).collect();
        let target: Vec<VarId> = (0..n).map(|l| var(&mut self.f, format!("tgt@{}@t{t}", tag(locs[l])))).collect();
        for p in 0..n {
            let from_here = self.actions_from(t, p);
            let tg = target[p].pos();
            self.f.add_implication(&[tg], &from_here);
            for a in from_here {
                self.f.add_implication(&[a], &[tg]);
            }
        }
        for l in 0..n {
            let (pth, tg) = (path[l].pos(), target[l].pos());
            let c = self.lay.character[t][l].pos();
            let occ = self.lay.occupied[t][l].pos();
            self.f.add_implication(&[occ], &[!pth]);
            let around: Vec<Lit> = self.grid.neighbors(l).map(|m| path[m].pos()).collect();
            // Path endpoints: one path neighbour. Interior: two.
            self.f.add_implication(&[c, !tg], &[pth]);
            implied_exactly(&mut self.f, &[c, !tg], &around, 1);
            self.f.add_implication(&[tg, !c], &[pth]);
            implied_exactly(&mut self.f, &[tg, !c], &around, 1);
            implied_exactly(&mut self.f, &[pth, !c, !tg], &around, 2);
        }
        ReachVars::Count { path, target }
    }

    /// Nothing changes unless an action touching the cell explains it.
    fn frame_axioms(&mut self, t: usize) {
        let n = self.grid.n();
        let mut touching: Vec<Vec<Lit>> = vec![Vec::new(); n];
        let mut arriving: Vec<Vec<Lit>> = vec![Vec::new(); n];
        for l in 0..n {
            for d in Direction::ALL {
                if let Some(a) = self.lay.action(t, l, d) {
                    let g = self.grid.step(l, d).expect("action has a destination");
                    touching[l].push(a.pos());
                    touching[g].push(a.pos());
                    arriving[g].push(a.pos());
                }
            }
        }
        for x in 0..n {
            for s in BallSize::ALL {
                let (now, next) = (self.ball(t, x, s), self.ball(t + 1, x, s));
                self.f.add_implication(&[now, !next], &touching[x]);
                self.f.add_implication(&[!now, next], &arriving[x]);
            }
            let (snow, snow_next) = (self.lay.snow[t][x].pos(), self.lay.snow[t + 1][x].pos());
            self.f.add_implication(&[!snow], &[!snow_next]);
            self.f.add_implication(&[snow, !snow_next], &arriving[x]);
            let occ_next = self.lay.occupied[t + 1][x].pos();
            self.f.add_implication(&[snow, !snow_next], &[occ_next]);
        }
    }

    fn invariants(&mut self) {
        let k = self.level.snowmen();
        for t in 0..=self.spec.horizon {
            let large: Vec<Lit> = (0..self.grid.n()).map(|l| self.ball(t, l, BallSize::Large)).collect();
            let small: Vec<Lit> = (0..self.grid.n()).map(|l| self.ball(t, l, BallSize::Small)).collect();
            self.f.at_most_k(&large, k);
            if k <= small.len() {
                self.f.at_least_k(&small, k);
            } else {
                self.f.add_clause([]);
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DecodeError {
    #[error("step {step}: {count} actions are true")]
    AmbiguousAction { step: usize, count: usize },
    #[error("step {0}: character position is not unique")]
    AmbiguousCharacter(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Decoded {
    /// Direction actions read straight from the model (`basic`).
    Moves(Plan),
    /// Ball actions, and their expansion into a move string. Expansion fails
    /// when a push position cannot be walked to, which only `cheating` allows.
    BallActions { actions: Vec<BallAction>, plan: Result<Plan, ExpandError> },
}

impl Decoded {
    pub fn plan(&self) -> Option<&Plan> {
        match self {
            Decoded::Moves(p) => Some(p),
            Decoded::BallActions { plan, .. } => plan.as_ref().ok(),
        }
    }
}

pub fn decode(encoding: &Encoding, model: &Assignment, level: &Level) -> Result<Decoded, DecodeError> {
    let lay = &encoding.layout;
    let horizon = encoding.spec.horizon;
    if encoding.spec.variant == Variant::Basic {
        let mut plan = Plan::new();
        for t in 0..horizon {
            let dirs: Vec<Direction> =
                Direction::ALL.into_iter().filter(|d| model.value(lay.directions[t][d.index()])).collect();
            let [dir] = dirs[..] else {
                return Err(DecodeError::AmbiguousAction { step: t, count: dirs.len() });
            };
            let here: Vec<usize> = (0..lay.locations.len()).filter(|&l| model.value(lay.character[t][l])).collect();
            let [here] = here[..] else { return Err(DecodeError::AmbiguousCharacter(t)) };
            let ball = level
                .neighbor(lay.locations[here], dir)
                .and_then(|f| level.index_of(f))
                .is_some_and(|f| model.value(lay.occupied[t][f]));
            plan.moves.push(Move { dir, ball });
        }
        return Ok(Decoded::Moves(plan));
    }
    let mut actions = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let chosen: Vec<(usize, Direction)> = (0..lay.locations.len())
            .flat_map(|l| Direction::ALL.map(move |d| (l, d)))
            .filter(|&(l, d)| lay.action(t, l, d).is_some_and(|v| model.value(v)))
            .collect();
        let [(l, d)] = chosen[..] else {
            return Err(DecodeError::AmbiguousAction { step: t, count: chosen.len() });
        };
        let from = lay.locations[l].step(d.inverse()).expect("push position is inside the grid");
        actions.push((from, d));
    }
    let plan = oracle::expand_actions(level, &actions);
    Ok(Decoded::BallActions { actions, plan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Assignment;
    use crate::level::parse_level;

    fn solve(enc: &Encoding) -> Option<Assignment> {
        let clauses: Vec<Vec<i32>> =
            enc.formula.clauses().iter().map(|c| c.iter().map(|l| l.dimacs()).collect()).collect();
        match cdcl::solve_clauses(enc.formula.var_count(), &clauses) {
            cdcl::SolveResult::Sat(m) => Some(Assignment::new(m)),
            cdcl::SolveResult::Unsat => None,
            cdcl::SolveResult::Unknown => unreachable!(),
        }
    }

    #[test]
    fn implied_exactly_matches_counting() {
        for m in 0..=4 {
            for k in 0..=3 {
                let mut f = CnfFormula::new();
                let a = f.new_var("a").unwrap().pos();
                let xs: Vec<Lit> = (0..m).map(|i| f.new_var(format!("x{i}")).unwrap().pos()).collect();
                implied_exactly(&mut f, &[a], &xs, k);
                for bits in 0u32..1 << (m + 1) {
                    let values: Vec<bool> = (0..=m).map(|i| bits >> i & 1 == 1).collect();
                    let asg = Assignment::new(values.clone());
                    let count = values[1..].iter().filter(|b| **b).count();
                    let expected = !values[0] || count == k;
                    assert_eq!(f.first_violated(&asg).is_none(), expected, "m={m} k={k} bits={bits:b}");
                }
            }
        }
    }

    #[test]
    fn mini2_horizons() {
        let level = parse_level("#####\n#p16#\n#####").unwrap();
        for variant in Variant::ALL {
            let zero = encode(&level, EncodingSpec::new(variant, 0));
            assert!(solve(&zero).is_none(), "{variant} T=0");
            let one = encode(&level, EncodingSpec::new(variant, 1));
            let model = solve(&one).unwrap_or_else(|| panic!("{variant} T=1 unsat"));
            let decoded = decode(&one, &model, &level).unwrap();
            assert_eq!(decoded.plan().unwrap().to_string(), "R", "{variant}");
            if let Decoded::BallActions { actions, .. } = decoded {
                assert_eq!(actions, vec![(Location::new(1, 1), Direction::Right)]);
            }
        }
    }

    #[test]
    fn presolved_is_sat_at_zero() {
        let level = parse_level("######\n#p.7.#\n######").unwrap();
        for variant in Variant::ALL {
            for inv in [false, true] {
                let enc = encode(&level, EncodingSpec::new(variant, 0).with_invariants(inv));
                assert!(solve(&enc).is_some(), "{variant}");
            }
        }
    }

    #[test]
    fn variable_names_are_structured() {
        let level = parse_level("#####\n#p16#\n#####").unwrap();
        let enc = encode(&level, EncodingSpec::new(Variant::ReachCount, 1));
        assert!(enc.formula.var("c@r1c1@t0").is_some());
        assert!(enc.formula.var("a@r1c2@R@t0").is_some());
        assert!(enc.formula.var("tgt@r1c1@t0").is_some());
        assert!(enc.formula.var("a@r1c2@R@t1").is_none());
        let enc = encode(&level, EncodingSpec::new(Variant::ReachOrder, 1));
        assert!(enc.formula.var("p@r1c1<r1c3@t0").is_some());
        assert!(enc.formula.var("e@r1c1>r1c2@t0").is_some());
    }

    #[test]
    fn variant_names_parse() {
        for v in Variant::ALL {
            assert_eq!(v.name().parse::<Variant>(), Ok(v));
        }
        assert_eq!("SAT-R-count".parse::<Variant>(), Ok(Variant::ReachCount));
        assert!("nope".parse::<Variant>().is_err());
    }
}

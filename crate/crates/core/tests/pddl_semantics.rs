//! The emitted PDDL is parsed and interpreted here with a small, separate
//! evaluator, then driven side by side with the simulator.

mod common;

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use snowplan::level::{BallSize, Direction, Level, Location, SizeSet};
use snowplan::pddl::{self, PddlVariant};
use snowplan::sim::{self, State, StepKind};

#[derive(Debug, Clone, PartialEq)]
enum Sx {
    Atom(String),
    List(Vec<Sx>),
}

impl Sx {
    fn atom(&self) -> &str {
        match self {
            Sx::Atom(a) => a,
            Sx::List(_) => panic!("expected atom, got {self:?}"),
        }
    }

    fn list(&self) -> &[Sx] {
        match self {
            Sx::List(l) => l,
            Sx::Atom(a) => panic!("expected list, got atom {a}"),
        }
    }

    fn head(&self) -> Option<&str> {
        match self {
            Sx::List(l) => match l.first() {
                Some(Sx::Atom(a)) => Some(a),
                _ => None,
            },
            Sx::Atom(_) => None,
        }
    }
}

fn parse_sx(text: &str) -> Sx {
    let mut tokens = Vec::new();
    for line in text.lines() {
        let line = line.split(';').next().unwrap();
        let spaced = line.replace('(', " ( ").replace(')', " ) ");
        tokens.extend(spaced.split_whitespace().map(str::to_lowercase));
    }
    let mut pos = 0;
    let sx = parse_tokens(&tokens, &mut pos);
    assert_eq!(pos, tokens.len(), "trailing tokens after the top-level form");
    sx
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Sx {
    let tok = &tokens[*pos];
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let mut items = Vec::new();
            while tokens[*pos] != ")" {
                items.push(parse_tokens(tokens, pos));
            }
            *pos += 1;
            Sx::List(items)
        }
        ")" => panic!("unbalanced ')'"),
        _ => Sx::Atom(tok.clone()),
    }
}

/// `(?a ?b - t ?c - u)` → [(?a,t), (?b,t), (?c,u)]
fn typed_list(items: &[Sx]) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut pending = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let a = items[i].atom();
        if a == "-" {
            let ty = items[i + 1].atom().to_string();
            out.extend(pending.drain(..).map(|v| (v, ty.clone())));
            i += 2;
        } else {
            pending.push(a.to_string());
            i += 1;
        }
    }
    assert!(pending.is_empty(), "untyped names {pending:?}");
    out
}

struct Action {
    params: Vec<(String, String)>,
    pre: Sx,
    eff: Sx,
}

/// Typed parameters, head predicate name, body.
type Derived = (Vec<(String, String)>, String, Sx);

struct Domain {
    types: BTreeSet<String>,
    predicates: HashMap<String, usize>,
    derived: Vec<Derived>,
    actions: HashMap<String, Action>,
}

fn parse_domain(text: &str) -> Domain {
    let sx = parse_sx(text);
    let items = sx.list();
    assert_eq!(items[0].atom(), "define");
    assert_eq!(items[1].head(), Some("domain"));
    let mut d = Domain { types: BTreeSet::new(), predicates: HashMap::new(), derived: Vec::new(), actions: HashMap::new() };
    for section in &items[2..] {
        let l = section.list();
        match section.head().unwrap() {
            ":requirements" | ":functions" => {}
            ":types" => d.types.extend(l[1..].iter().map(|t| t.atom().to_string())),
            ":predicates" => {
                for p in &l[1..] {
                    let pl = p.list();
                    d.predicates.insert(pl[0].atom().to_string(), typed_list(&pl[1..]).len());
                }
            }
            ":derived" => {
                let head = l[1].list();
                d.derived.push((typed_list(&head[1..]), head[0].atom().to_string(), l[2].clone()));
            }
            ":action" => {
                let name = l[1].atom().to_string();
                let mut params = None;
                let mut pre = None;
                let mut eff = None;
                let mut i = 2;
                while i < l.len() {
                    match l[i].atom() {
                        ":parameters" => params = Some(typed_list(l[i + 1].list())),
                        ":precondition" => pre = Some(l[i + 1].clone()),
                        ":effect" => eff = Some(l[i + 1].clone()),
                        other => panic!("unknown action key {other}"),
                    }
                    i += 2;
                }
                d.actions.insert(name, Action { params: params.unwrap(), pre: pre.unwrap(), eff: eff.unwrap() });
            }
            other => panic!("unknown domain section {other}"),
        }
    }
    d
}

/// Static well-formedness: declared predicates with the right arity, bound
/// variables, declared types.
fn check_formula(d: &Domain, f: &Sx, bound: &HashSet<String>) {
    let l = f.list();
    match f.head().unwrap() {
        "and" | "or" => l[1..].iter().for_each(|g| check_formula(d, g, bound)),
        "not" => {
            assert_eq!(l.len(), 2);
            check_formula(d, &l[1], bound)
        }
        "forall" | "exists" => {
            let mut inner = bound.clone();
            for (v, t) in typed_list(l[1].list()) {
                assert!(d.types.contains(&t), "undeclared type {t}");
                inner.insert(v);
            }
            check_formula(d, &l[2], &inner)
        }
        "when" => {
            check_formula(d, &l[1], bound);
            check_formula(d, &l[2], bound)
        }
        "increase" => assert_eq!(l[1], Sx::List(vec![Sx::Atom("total-cost".into())])),
        "=" => check_args(&l[1..], bound),
        pred => {
            assert_eq!(d.predicates.get(pred).copied(), Some(l.len() - 1), "predicate {pred} arity");
            check_args(&l[1..], bound)
        }
    }
}

fn check_args(args: &[Sx], bound: &HashSet<String>) {
    for a in args {
        let a = a.atom();
        assert!(!a.starts_with('?') || bound.contains(a), "unbound variable {a}");
    }
}

fn check_domain(d: &Domain) {
    for (params, head, body) in &d.derived {
        assert_eq!(d.predicates.get(head).copied(), Some(params.len()));
        check_formula(d, body, &params.iter().map(|p| p.0.clone()).collect());
    }
    for a in d.actions.values() {
        let bound: HashSet<String> = a.params.iter().map(|p| p.0.clone()).collect();
        for (_, t) in &a.params {
            assert!(d.types.contains(t));
        }
        check_formula(d, &a.pre, &bound);
        check_formula(d, &a.eff, &bound);
    }
}

type Fact = Vec<String>;

struct World<'d> {
    domain: &'d Domain,
    objects: HashMap<String, Vec<String>>,
    facts: HashSet<Fact>,
    cost: u32,
}

fn parse_problem<'d>(domain: &'d Domain, text: &str) -> (World<'d>, Sx) {
    let sx = parse_sx(text);
    let items = sx.list();
    let mut objects: HashMap<String, Vec<String>> = HashMap::new();
    let mut facts = HashSet::new();
    let mut goal = None;
    for section in &items[2..] {
        let l = section.list();
        match section.head().unwrap() {
            ":domain" | ":metric" => {}
            ":objects" => {
                for (o, t) in typed_list(&l[1..]) {
                    assert!(domain.types.contains(&t));
                    objects.entry(t).or_default().push(o);
                }
            }
            ":init" => {
                for f in &l[1..] {
                    if f.head() == Some("=") {
                        continue;
                    }
                    let fact: Fact = f.list().iter().map(|a| a.atom().to_string()).collect();
                    assert_eq!(domain.predicates.get(&fact[0]).copied(), Some(fact.len() - 1));
                    facts.insert(fact);
                }
            }
            ":goal" => goal = Some(l[1].clone()),
            other => panic!("unknown problem section {other}"),
        }
    }
    (World { domain, objects, facts, cost: 0 }, goal.unwrap())
}

impl World<'_> {
    fn resolve(&self, a: &Sx, env: &HashMap<String, String>) -> String {
        let a = a.atom();
        env.get(a).cloned().unwrap_or_else(|| a.to_string())
    }

    fn bindings(&self, vars: &[(String, String)], env: &HashMap<String, String>) -> Vec<HashMap<String, String>> {
        let mut out = vec![env.clone()];
        for (v, t) in vars {
            let objs = self.objects.get(t).cloned().unwrap_or_default();
            out = out
                .into_iter()
                .flat_map(|e| {
                    objs.iter().map(move |o| {
                        let mut e = e.clone();
                        e.insert(v.clone(), o.clone());
                        e
                    })
                })
                .collect();
        }
        out
    }

    fn holds(&self, f: &Sx, env: &HashMap<String, String>, facts: &HashSet<Fact>) -> bool {
        let l = f.list();
        match f.head().unwrap() {
            "and" => l[1..].iter().all(|g| self.holds(g, env, facts)),
            "or" => l[1..].iter().any(|g| self.holds(g, env, facts)),
            "not" => !self.holds(&l[1], env, facts),
            "=" => self.resolve(&l[1], env) == self.resolve(&l[2], env),
            "forall" => self.bindings(&typed_list(l[1].list()), env).iter().all(|e| self.holds(&l[2], e, facts)),
            "exists" => self.bindings(&typed_list(l[1].list()), env).iter().any(|e| self.holds(&l[2], e, facts)),
            _ => {
                let fact: Fact = std::iter::once(l[0].atom().to_string())
                    .chain(l[1..].iter().map(|a| self.resolve(a, env)))
                    .collect();
                facts.contains(&fact)
            }
        }
    }

    /// Base facts plus the least fixpoint of the derived predicates.
    fn closed(&self) -> HashSet<Fact> {
        let mut facts = self.facts.clone();
        loop {
            let mut added = false;
            for (params, head, body) in &self.domain.derived {
                for env in self.bindings(params, &HashMap::new()) {
                    let fact: Fact =
                        std::iter::once(head.clone()).chain(params.iter().map(|p| env[&p.0].clone())).collect();
                    if !facts.contains(&fact) && self.holds(body, &env, &facts) {
                        facts.insert(fact);
                        added = true;
                    }
                }
            }
            if !added {
                return facts;
            }
        }
    }

    fn applicable(&self, action: &str, args: &[String]) -> bool {
        let a = &self.domain.actions[action];
        let env: HashMap<String, String> = a.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
        self.holds(&a.pre, &env, &self.closed())
    }

    fn collect(&self, eff: &Sx, env: &HashMap<String, String>, facts: &HashSet<Fact>, adds: &mut Vec<Fact>, dels: &mut Vec<Fact>, cost: &mut u32) {
        let l = eff.list();
        match eff.head().unwrap() {
            "and" => l[1..].iter().for_each(|e| self.collect(e, env, facts, adds, dels, cost)),
            "when" => {
                if self.holds(&l[1], env, facts) {
                    self.collect(&l[2], env, facts, adds, dels, cost);
                }
            }
            "forall" => {
                for e in self.bindings(&typed_list(l[1].list()), env) {
                    self.collect(&l[2], &e, facts, adds, dels, cost);
                }
            }
            "increase" => *cost += l[2].atom().parse::<u32>().unwrap(),
            "not" => {
                let inner = l[1].list();
                dels.push(std::iter::once(inner[0].atom().to_string()).chain(inner[1..].iter().map(|a| self.resolve(a, env))).collect());
            }
            _ => adds.push(std::iter::once(l[0].atom().to_string()).chain(l[1..].iter().map(|a| self.resolve(a, env))).collect()),
        }
    }

    fn apply(&mut self, action: &str, args: &[String]) {
        assert!(self.applicable(action, args), "{action} {args:?} not applicable");
        let a = &self.domain.actions[action];
        let env: HashMap<String, String> = a.params.iter().map(|p| p.0.clone()).zip(args.iter().cloned()).collect();
        let closed = self.closed();
        let (mut adds, mut dels, mut cost) = (Vec::new(), Vec::new(), 0);
        self.collect(&a.eff, &env, &closed, &mut adds, &mut dels, &mut cost);
        for f in dels {
            self.facts.remove(&f);
        }
        self.facts.extend(adds);
        self.cost += cost;
    }

    fn goal_reachable(&self) -> bool {
        let a = &self.domain.actions["goal"];
        self.bindings(&a.params, &HashMap::new()).iter().any(|e| self.holds(&a.pre, e, &self.facts))
    }

    fn balls_at(&self, loc: &str) -> Vec<String> {
        let mut v: Vec<String> =
            self.facts.iter().filter(|f| f[0] == "ball_at" && f[2] == loc).map(|f| f[1].clone()).collect();
        v.sort();
        v
    }

    fn size_of(&self, ball: &str) -> BallSize {
        let sizes: Vec<BallSize> = [("ball_size_s", BallSize::Small), ("ball_size_m", BallSize::Medium), ("ball_size_l", BallSize::Large)]
            .into_iter()
            .filter(|(p, _)| self.facts.contains(&vec![p.to_string(), ball.to_string()]))
            .map(|(_, s)| s)
            .collect();
        assert_eq!(sizes.len(), 1, "ball {ball} has sizes {sizes:?}");
        sizes[0]
    }

    fn top_ball(&self, loc: &str) -> Option<String> {
        self.balls_at(loc).into_iter().min_by_key(|b| self.size_of(b))
    }

    /// Asserts the PDDL state describes the same situation as `state`.
    fn assert_matches(&self, level: &Level, state: &State) {
        for &l in level.valid_locations() {
            let name = pddl::loc_name(l);
            assert_eq!(self.facts.contains(&vec!["snow".into(), name.clone()]), state.has_snow(l), "snow at {l:?}");
            assert_eq!(self.facts.contains(&vec!["char_at".into(), name.clone()]), state.character() == l, "char at {l:?}");
            let sizes = SizeSet::from_sizes(self.balls_at(&name).iter().map(|b| self.size_of(b)));
            assert_eq!(sizes.len(), self.balls_at(&name).len(), "duplicate sizes at {l:?}");
            assert_eq!(sizes, state.balls_at(l), "balls at {l:?}");
            assert_eq!(self.facts.contains(&vec!["occ".into(), name.clone()]), !sizes.is_empty(), "occ at {l:?}");
        }
    }
}

fn n(l: Location) -> String {
    pddl::loc_name(l)
}

fn d(x: Direction) -> String {
    pddl::dir_name(x).to_string()
}

#[test]
fn emitted_domains_are_well_formed() {
    for v in PddlVariant::ALL {
        for k in 1..=3 {
            let domain = parse_domain(&pddl::emit_domain(v, k));
            check_domain(&domain);
            assert_eq!(domain.actions.contains_key("move_character"), v == PddlVariant::Basic);
            assert_eq!(domain.derived.is_empty(), v != PddlVariant::Reachability);
            assert_eq!(domain.actions["goal"].params.iter().filter(|p| p.1 == "ball").count(), 3 * k);
        }
    }
}

#[test]
fn problem_facts_match_level() {
    let mut rng = StdRng::seed_from_u64(3);
    for _ in 0..30 {
        let k = rng.gen_range(1..=2);
        let level = common::random_level(&mut rng, 6, 4, k);
        let domain = parse_domain(&pddl::emit_domain(PddlVariant::Basic, level.snowmen()));
        let (world, goal) = parse_problem(&domain, &pddl::emit_problem(&level, PddlVariant::Basic));
        assert_eq!(goal, Sx::List(vec![Sx::Atom("goal".into())]));
        world.assert_matches(&level, &State::initial(&level));
        assert_eq!(world.objects["ball"].len(), 3 * level.snowmen());
        let next: Vec<&Fact> = world.facts.iter().filter(|f| f[0] == "next").collect();
        let expected: usize = level
            .valid_locations()
            .iter()
            .map(|&l| Direction::ALL.iter().filter(|&&x| level.neighbor(l, x).is_some()).count())
            .sum();
        assert_eq!(next.len(), expected);
        for f in next {
            let dir = Direction::ALL.into_iter().find(|x| d(*x) == f[3]).unwrap();
            assert!(world.facts.contains(&vec!["next".into(), f[2].clone(), f[1].clone(), d(dir.inverse())]));
        }
    }
}

/// Random walks on the basic model: every simulator step is exactly one
/// applicable PDDL action, and every blocked step has none.
#[test]
fn basic_model_follows_simulator() {
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..25 {
        let level = common::random_level(&mut rng, 5, 4, 1);
        let domain = parse_domain(&pddl::emit_domain(PddlVariant::Basic, 1));
        let (mut world, _) = parse_problem(&domain, &pddl::emit_problem(&level, PddlVariant::Basic));
        let mut state = State::initial(&level);
        for _ in 0..25 {
            let dir = *Direction::ALL.choose(&mut rng).unwrap();
            let here = state.character();
            let front = level.neighbor(here, dir);
            let beyond = front.and_then(|f| level.neighbor(f, dir));
            let candidates: Vec<(&str, Vec<String>)> = match (front, beyond) {
                (None, _) => vec![],
                (Some(f), g) => {
                    let mut c = vec![("move_character", vec![n(here), n(f), d(dir)])];
                    if let Some(g) = g {
                        for b in world.balls_at(&n(f)) {
                            c.push(("move_ball", vec![b, n(here), n(f), n(g), d(dir)]));
                        }
                    }
                    c
                }
            };
            let applicable: Vec<_> = candidates.iter().filter(|(a, args)| world.applicable(a, args)).collect();
            match sim::step(&level, &state, dir) {
                Err(_) => assert!(applicable.is_empty(), "{applicable:?} applicable on a blocked step"),
                Ok(o) => {
                    assert_eq!(applicable.len(), 1, "{:?}: {applicable:?}", o.kind);
                    let (a, args) = applicable[0];
                    assert_eq!(*a == "move_ball", o.kind != StepKind::Walk);
                    world.apply(a, args);
                    state = o.next;
                    world.assert_matches(&level, &state);
                }
            }
            assert_eq!(world.goal_reachable(), state.is_goal(1));
        }
    }
}

/// Ball actions from anywhere: the reachability model allows exactly the
/// push positions the character can walk to, the cheating model any free one.
#[test]
fn ball_move_models_follow_simulator() {
    let mut rng = StdRng::seed_from_u64(5);
    for variant in [PddlVariant::Reachability, PddlVariant::Cheating] {
        for _ in 0..15 {
            let level = common::random_level(&mut rng, 5, 4, 1);
            let domain = parse_domain(&pddl::emit_domain(variant, 1));
            let (mut world, _) = parse_problem(&domain, &pddl::emit_problem(&level, variant));
            let mut state = State::initial(&level);
            let mut moved = 0;
            for _ in 0..6 {
                let reach = sim::reachable_cells(&level, &state);
                let mut options = Vec::new();
                for &ppos in level.valid_locations() {
                    for dir in Direction::ALL {
                        let (Some(f), true) = (level.neighbor(ppos, dir), state.balls_at(ppos).is_empty()) else { continue };
                        let Some(g) = level.neighbor(f, dir) else { continue };
                        let Some(b) = world.top_ball(&n(f)) else { continue };
                        let args = match variant {
                            PddlVariant::Reachability => vec![b, n(state.character()), n(ppos), n(f), n(g), d(dir)],
                            _ => vec![b, n(ppos), n(f), n(g), d(dir)],
                        };
                        let legal = sim::step(&level, &state.with_character(ppos), dir).ok();
                        let allowed = legal.is_some() && (variant == PddlVariant::Cheating || reach.contains(&ppos));
                        assert_eq!(world.applicable("move_ball", &args), allowed, "{variant} {ppos:?} {dir:?}\n{level}");
                        if allowed {
                            options.push((args, legal.unwrap().next));
                        }
                    }
                }
                let Some((args, next)) = options.choose(&mut rng).cloned() else { break };
                world.apply("move_ball", &args);
                moved += 1;
                state = next;
                world.assert_matches(&level, &state);
            }
            assert_eq!(world.cost, moved);
        }
    }
}

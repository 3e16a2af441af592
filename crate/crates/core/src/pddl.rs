//! PDDL domain and problem generation for external planners.
//!
//! Three domain flavours share one `move_ball` action:
//!
//! * `basic` also has `move_character`, so walks are explicit actions;
//! * `cheating` drops `move_character` and lets the character appear at the
//!   push position as long as it is free;
//! * `reachability` drops `move_character` and requires the push position to
//!   be reachable through the derived predicate `reachable`.
//!
//! Only `move_ball` costs 1, so `(:metric minimize (total-cost))` minimises
//! ball moves.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::level::{BallSize, Direction, Level, Location};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PddlVariant {
    Basic,
    Cheating,
    Reachability,
}

impl PddlVariant {
    pub const ALL: [PddlVariant; 3] = [PddlVariant::Basic, PddlVariant::Cheating, PddlVariant::Reachability];

    pub fn name(self) -> &'static str {
        match self {
            PddlVariant::Basic => "basic",
            PddlVariant::Cheating => "cheating",
            PddlVariant::Reachability => "reachability",
        }
    }
}

impl fmt::Display for PddlVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("unknown PDDL variant {0:?} (expected basic, cheating or reachability)")]
pub struct UnknownPddlVariant(pub String);

impl FromStr for PddlVariant {
    type Err = UnknownPddlVariant;

    /// Also accepts planner-qualified names such as `basic-LAMA`; the
    /// planner part is dropped since only the input files are produced.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        let model = ["-blind", "-lama", "-symk"].iter().find_map(|p| lower.strip_suffix(p)).unwrap_or(&lower);
        match model {
            "basic" => Ok(PddlVariant::Basic),
            "cheating" => Ok(PddlVariant::Cheating),
            "reachability" | "reach" => Ok(PddlVariant::Reachability),
            _ => Err(UnknownPddlVariant(s.to_string())),
        }
    }
}

pub fn domain_name(variant: PddlVariant) -> String {
    format!("snowman-{variant}")
}

pub fn loc_name(loc: Location) -> String {
    format!("loc_{}_{}", loc.row, loc.col)
}

pub fn dir_name(d: Direction) -> &'static str {
    d.name()
}

fn size_predicate(s: BallSize) -> &'static str {
    match s {
        BallSize::Small => "ball_size_s",
        BallSize::Medium => "ball_size_m",
        BallSize::Large => "ball_size_l",
    }
}

/// `?b` is strictly smaller than `?o`.
fn smaller(b: &str, o: &str) -> String {
    format!(
        "(or (and (ball_size_s {b}) (ball_size_m {o}))\n\
         \x20                   (and (ball_size_s {b}) (ball_size_l {o}))\n\
         \x20                   (and (ball_size_m {b}) (ball_size_l {o})))"
    )
}

fn move_ball(variant: PddlVariant) -> String {
    let params = match variant {
        PddlVariant::Reachability => "?b - ball ?prevpos ?ppos ?from ?to - loc ?d - dir",
        _ => "?b - ball ?ppos ?from ?to - loc ?d - dir",
    };
    let character_pre = match variant {
        PddlVariant::Basic => "(char_at ?ppos)",
        PddlVariant::Cheating => "(not (occ ?ppos))",
        PddlVariant::Reachability => "(char_at ?prevpos)\n    (reachable ?prevpos ?ppos)",
    };
    let alone = "(forall (?o - ball) (or (= ?o ?b) (not (ball_at ?o ?from))))";
    let character_eff = match variant {
        PddlVariant::Basic => format!(
            "(when {alone}\n      (and (not (char_at ?ppos)) (char_at ?from) (not (occ ?from))))"
        ),
        PddlVariant::Cheating => format!(
            "(forall (?x - loc) (when (char_at ?x) (not (char_at ?x))))\n    \
             (when {alone}\n      (and (char_at ?from) (not (occ ?from))))\n    \
             (when (not {alone})\n      (char_at ?ppos))"
        ),
        PddlVariant::Reachability => format!(
            "(not (char_at ?prevpos))\n    \
             (when {alone}\n      (and (char_at ?from) (not (occ ?from))))\n    \
             (when (not {alone})\n      (char_at ?ppos))"
        ),
    };
    format!(
        "(:action move_ball
  :parameters ({params})
  :precondition (and
    (next ?ppos ?from ?d) (next ?from ?to ?d)
    (ball_at ?b ?from)
    {character_pre}
    (forall (?o - ball)
      (or (= ?o ?b)
          (not (ball_at ?o ?from))
          {top}))
    (or {alone}
        (forall (?o - ball) (not (ball_at ?o ?to))))
    (forall (?o - ball)
      (or (not (ball_at ?o ?to))
          {fits})))
  :effect (and
    (occ ?to)
    (not (ball_at ?b ?from)) (ball_at ?b ?to)
    {character_eff}
    (not (snow ?to))
    (when (and (snow ?to) (ball_size_s ?b))
      (and (not (ball_size_s ?b)) (ball_size_m ?b)))
    (when (and (snow ?to) (ball_size_m ?b))
      (and (not (ball_size_m ?b)) (ball_size_l ?b)))
    (increase (total-cost) 1)))",
        top = smaller("?b", "?o"),
        fits = smaller("?b", "?o"),
    )
}

const MOVE_CHARACTER: &str = "(:action move_character
  :parameters (?from ?to - loc ?d - dir)
  :precondition (and (next ?from ?to ?d) (char_at ?from) (not (occ ?to)))
  :effect (and (not (char_at ?from)) (char_at ?to)))";

const REACHABLE: &str = "(:derived (reachable ?s ?t - loc)
  (and
    (or (= ?s ?t)
        (exists (?d - dir)
          (exists (?m - loc)
            (and (next ?s ?m ?d)
                 (not (occ ?m))
                 (reachable ?m ?t)))))
    (not (occ ?t))))";

fn goal_action(k: usize) -> String {
    let balls: Vec<String> = (0..3 * k).map(|i| format!("?b{i}")).collect();
    let locs: Vec<String> = (0..k).map(|i| format!("?p{i}")).collect();
    let mut pre = String::new();
    for list in [&balls, &locs] {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let _ = write!(pre, "\n    (not (= {} {}))", list[i], list[j]);
            }
        }
    }
    for (i, b) in balls.iter().enumerate() {
        let _ = write!(pre, "\n    (ball_at {b} {})", locs[i / 3]);
    }
    format!(
        "(:action goal
  :parameters ({} - ball {} - loc)
  :precondition (and{pre})
  :effect (goal))",
        balls.join(" "),
        locs.join(" ")
    )
}

pub fn emit_domain(variant: PddlVariant, snowmen: usize) -> String {
    assert!(snowmen >= 1, "a domain needs at least one snowman");
    let mut requirements = vec![
        ":typing",
        ":equality",
        ":negative-preconditions",
        ":disjunctive-preconditions",
        ":universal-preconditions",
        ":conditional-effects",
        ":action-costs",
    ];
    if variant == PddlVariant::Reachability {
        requirements.push(":existential-preconditions");
        requirements.push(":derived-predicates");
    }
    let mut predicates = vec![
        "(snow ?l - loc)",
        "(next ?from ?to - loc ?d - dir)",
        "(occ ?l - loc)",
        "(char_at ?l - loc)",
        "(ball_at ?b - ball ?l - loc)",
        "(ball_size_s ?b - ball)",
        "(ball_size_m ?b - ball)",
        "(ball_size_l ?b - ball)",
        "(goal)",
    ];
    if variant == PddlVariant::Reachability {
        predicates.push("(reachable ?s ?t - loc)");
    }
    let mut out = String::new();
    let _ = writeln!(out, "(define (domain {})", domain_name(variant));
    let _ = writeln!(out, "(:requirements {})", requirements.join(" "));
    let _ = writeln!(out, "(:types loc dir ball)");
    let _ = writeln!(out, "(:predicates\n  {})", predicates.join("\n  "));
    let _ = writeln!(out, "(:functions (total-cost) - number)");
    if variant == PddlVariant::Reachability {
        let _ = writeln!(out, "\n{REACHABLE}");
    }
    if variant == PddlVariant::Basic {
        let _ = writeln!(out, "\n{MOVE_CHARACTER}");
    }
    let _ = writeln!(out, "\n{}", move_ball(variant));
    let _ = writeln!(out, "\n{}", goal_action(snowmen));
    out.push_str(")\n");
    out
}

/// Ball objects in row-major stack order, bottom ball first.
pub fn ball_objects(level: &Level) -> Vec<(String, Location, BallSize)> {
    let mut out = Vec::new();
    for (&loc, set) in level.stacks() {
        for size in set.bottom_first() {
            out.push((format!("ball{}", out.len() + 1), loc, size));
        }
    }
    out
}

pub fn emit_problem(level: &Level, variant: PddlVariant) -> String {
    emit_problem_named(level, variant, "level")
}

pub fn emit_problem_named(level: &Level, variant: PddlVariant, name: &str) -> String {
    let locs = level.valid_locations();
    let balls = ball_objects(level);
    let mut out = String::new();
    let _ = writeln!(out, "(define (problem {})", sanitize(name));
    let _ = writeln!(out, "(:domain {})", domain_name(variant));
    let _ = writeln!(out, "(:objects");
    let _ = writeln!(out, "  {} - loc", locs.iter().map(|l| loc_name(*l)).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "  {} - dir", Direction::ALL.map(dir_name).join(" "));
    let _ = writeln!(out, "  {} - ball)", balls.iter().map(|b| b.0.as_str()).collect::<Vec<_>>().join(" "));
    let _ = writeln!(out, "(:init");
    let _ = writeln!(out, "  (= (total-cost) 0)");
    for &l in locs {
        for d in Direction::ALL {
            if let Some(n) = level.neighbor(l, d) {
                let _ = writeln!(out, "  (next {} {} {})", loc_name(l), loc_name(n), dir_name(d));
            }
        }
    }
    for &l in locs.iter().filter(|l| level.has_initial_snow(**l)) {
        let _ = writeln!(out, "  (snow {})", loc_name(l));
    }
    for l in level.stacks().keys() {
        let _ = writeln!(out, "  (occ {})", loc_name(*l));
    }
    let _ = writeln!(out, "  (char_at {})", loc_name(level.character()));
    for (b, l, s) in &balls {
        let _ = writeln!(out, "  (ball_at {b} {})", loc_name(*l));
        let _ = writeln!(out, "  ({} {b})", size_predicate(*s));
    }
    let _ = writeln!(out, ")");
    let _ = writeln!(out, "(:goal (goal))");
    let _ = writeln!(out, "(:metric minimize (total-cost))");
    out.push_str(")\n");
    out
}

fn sanitize(name: &str) -> String {
    let s: String = name.chars().map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' }).collect();
    if s.starts_with(|c: char| c.is_ascii_alphabetic()) { s } else { format!("p{s}") }
}

/// Writes `<name>-<variant>-domain.pddl` and `<name>-<variant>-problem.pddl`
/// into `dir`, returning both paths.
pub fn write_files(level: &Level, name: &str, variant: PddlVariant, dir: &Path) -> std::io::Result<(PathBuf, PathBuf)> {
    std::fs::create_dir_all(dir)?;
    let domain = dir.join(format!("{name}-{variant}-domain.pddl"));
    let problem = dir.join(format!("{name}-{variant}-problem.pddl"));
    std::fs::write(&domain, emit_domain(variant, level.snowmen()))?;
    std::fs::write(&problem, emit_problem_named(level, variant, name))?;
    Ok((domain, problem))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::level::parse_level;

    #[test]
    fn domain_flavours() {
        let basic = emit_domain(PddlVariant::Basic, 1);
        assert!(basic.contains("(increase (total-cost) 1)"));
        assert!(basic.contains("(:action move_character"));
        assert!(!basic.contains(":derived"));
        let reach = emit_domain(PddlVariant::Reachability, 1);
        assert!(reach.contains("(:derived (reachable"));
        assert!(!reach.contains("move_character"));
        assert!(reach.contains(":derived-predicates"));
        let cheat = emit_domain(PddlVariant::Cheating, 2);
        assert!(!cheat.contains("move_character") && !cheat.contains("reachable"));
        assert!(cheat.contains("?b5 - ball ?p0 ?p1 - loc"));
    }

    #[test]
    fn mini2_problem() {
        let level = parse_level("#####\n#p16#\n#####").unwrap();
        let p = emit_problem(&level, PddlVariant::Basic);
        assert!(p.contains("(ball_size_s ball1)"));
        assert!(p.contains("(ball_size_l ball2)"));
        assert!(p.contains("(ball_size_m ball3)"));
        assert!(p.contains("(char_at loc_1_1)"));
        assert!(p.contains("(:metric minimize (total-cost))"));
        assert_eq!(p.matches("(next ").count(), 4);
    }

    #[test]
    fn planner_qualified_names() {
        assert_eq!("basic-LAMA".parse::<PddlVariant>().unwrap(), PddlVariant::Basic);
        assert_eq!("cheating-SymK".parse::<PddlVariant>().unwrap(), PddlVariant::Cheating);
        assert_eq!("reachability-blind".parse::<PddlVariant>().unwrap(), PddlVariant::Reachability);
        assert!("basic-ff".parse::<PddlVariant>().is_err());
    }
}

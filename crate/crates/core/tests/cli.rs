use std::path::PathBuf;
use std::process::{Command, Output};

fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn snowplan(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snowplan")).args(args).env_remove("SNOWPLAN_SOLVER").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_reports_and_exits() {
    let mini = corpus("mini2.lvl");
    let ok = snowplan(&["validate", mini.to_str().unwrap(), "R"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout(&ok).trim(), "valid, 1 ball move");

    let blocked = snowplan(&["validate", mini.to_str().unwrap(), "L"]);
    assert_eq!(blocked.status.code(), Some(1));
    assert!(stdout(&blocked).contains("blocked at step 1"), "{}", stdout(&blocked));

    let short = snowplan(&["validate", mini.to_str().unwrap(), ""]);
    assert_eq!(short.status.code(), Some(1));

    let bad = snowplan(&["validate", mini.to_str().unwrap(), "xyz"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn solve_prints_a_certified_plan() {
    let out = snowplan(&["solve", corpus("mini2.lvl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("plan: R\n"), "{text}");
    assert!(text.contains("optimal: certified"), "{text}");

    let plus = snowplan(&["solve", corpus("mini2.lvl").to_str().unwrap(), "--encoding", "SAT-R-count+", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&plus.stdout).unwrap();
    assert_eq!(v["variant"], "reach-count");
    assert_eq!(v["invariants"], true);

    let json = snowplan(&["solve", corpus("mini2.lvl").to_str().unwrap(), "--encoding", "reach-order", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["plan"], "R");
    assert_eq!(v["ball_moves"], 1);
    assert_eq!(v["variant"], "reach-order");
    assert_eq!(v["certified_optimal"], true);
}

#[test]
fn solve_with_external_solver() {
    let cmd = format!("{} sat {{}}", env!("CARGO_BIN_EXE_snowplan"));
    let out = snowplan(&["solve", corpus("two-snowmen.lvl").to_str().unwrap(), "--solver", &cmd, "--json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["ball_moves"], 2);
}

#[test]
fn cheating_plan_is_flagged() {
    let out = snowplan(&["solve", corpus("cheat-boxed.lvl").to_str().unwrap(), "-e", "cheating"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("is invalid"), "{}", stdout(&out));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(snowplan(&["solve"]).status.code(), Some(2));
    assert_eq!(snowplan(&["solve", corpus("mini2.lvl").to_str().unwrap(), "-e", "nope"]).status.code(), Some(2));
    assert_eq!(snowplan(&["solve", "/nonexistent.lvl"]).status.code(), Some(2));
    assert_eq!(snowplan(&["solve", corpus("mini2.lvl").to_str().unwrap(), "--solver", "/no/such/solver"]).status.code(), Some(3));
}

#[test]
fn oracle_encode_and_sat_round_trip() {
    let out = snowplan(&["oracle", corpus("two-snowmen.lvl").to_str().unwrap(), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "solved");
    assert_eq!(v["ball_moves"], 2);

    let dir = tempfile::tempdir().unwrap();
    let cnf = dir.path().join("f.cnf");
    for (t, code) in [("1", 20), ("2", 10)] {
        let out = snowplan(&["encode", corpus("two-snowmen.lvl").to_str().unwrap(), "-T", t, "-o", cnf.to_str().unwrap(), "--comments"]);
        assert_eq!(out.status.code(), Some(0));
        let text = std::fs::read_to_string(&cnf).unwrap();
        assert!(text.contains("p cnf "));
        assert!(text.contains("c c@r1c1@t0 = "), "named comments present");
        let sat = snowplan(&["sat", cnf.to_str().unwrap()]);
        assert_eq!(sat.status.code(), Some(code));
    }
}

#[test]
fn pddl_files_are_written() {
    let dir = tempfile::tempdir().unwrap();
    let out = snowplan(&["pddl", corpus("mini2.lvl").to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let single = tempfile::tempdir().unwrap();
    let out = snowplan(&["pddl", corpus("mini2.lvl").to_str().unwrap(), "--variant", "cheating-LAMA", "-o", single.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read_dir(single.path()).unwrap().count(), 2);
    for v in ["basic", "cheating", "reachability"] {
        let domain = std::fs::read_to_string(dir.path().join(format!("mini2-{v}-domain.pddl"))).unwrap();
        assert!(domain.starts_with("(define (domain"));
        assert!(dir.path().join(format!("mini2-{v}-problem.pddl")).exists());
    }
}

#[test]
fn bench_table_and_json() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["mini2", "presolved", "two-snowmen"] {
        std::fs::copy(corpus(&format!("{name}.lvl")), dir.path().join(format!("{name}.lvl"))).unwrap();
    }
    let d = dir.path().to_str().unwrap();
    let out = snowplan(&["bench", d, "--encodings", "reach-order,SAT-R-count,cheating+", "--timeout", "30", "--workers", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("instance"));
    assert!(lines[0].contains("reach-order") && lines[0].contains("reach-count") && lines[0].contains("cheating+"));
    assert!(lines[1].starts_with("mini2"));
    assert!(lines.iter().any(|l| l.starts_with("solved")));
    assert!(lines.last().unwrap().starts_with("PAR-2"));

    let out = snowplan(&["bench", d, "--encodings", "reach-count", "--json"]);
    let rows: Vec<serde_json::Value> =
        stdout(&out).lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(rows.len(), 4);
    assert_eq!(rows[0]["instance"], "mini2");
    assert_eq!(rows[2]["ball_moves"], 2);
    assert_eq!(rows[3]["solved"], 3);
}

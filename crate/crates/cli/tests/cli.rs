use std::path::Path;
use std::process::{Command, Output};

fn lowrand(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lowrand"))
        .args(args)
        .env("LOWRAND_OUT", out)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn solve_reports_value_and_equilibria() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowrand(&["solve", "--game", "matching-pennies"], dir.path());
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("value 0\n"), "{text}");
    assert!(text.contains("row strategy 1/2 1/2"));
    assert!(text.contains("equilibria 1"));
}

#[test]
fn construct_then_certify_folk() {
    let dir = tempfile::tempdir().unwrap();
    let o = lowrand(&["construct", "folk", "--game", "mp-punishment", "--n", "5", "--target", "3,3"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("payoff 12/5 12/5"));
    let plan: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["effective_entropy"], serde_json::json!(["1", "1"]));
    let profile = dir.path().join("profile.json");
    let o = lowrand(&["certify", "--game", "mp-punishment", "--n", "5", "--profile", profile.to_str().unwrap()], dir.path());
    assert!(o.status.success());
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["verdict"], "exact-NE");
    assert_eq!(rep["exploitability"], serde_json::json!(["0", "0"]));
}

#[test]
fn certify_exits_two_on_violation() {
    let dir = tempfile::tempdir().unwrap();
    let profile = dir.path().join("pure.json");
    std::fs::write(
        &profile,
        r#"[{"owner":0,"kind":"schedule","stages":[[1,0],[1,0]]},{"owner":1,"kind":"schedule","stages":[[1,0],[1,0]]}]"#,
    )
    .unwrap();
    let args = ["certify", "--game", "matching-pennies", "--n", "2", "--profile", profile.to_str().unwrap(), "--eps", "1/2"];
    let o = lowrand(&args, dir.path());
    assert_eq!(o.status.code(), Some(2));
    let rep: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(rep["verdict"], "not-NE");
    assert_eq!(rep["deviator"], 1);
    // without eps the report alone is not a violation
    let o = lowrand(&args[..7], dir.path());
    assert!(o.status.success());
}

#[test]
fn exploit_transcript_has_every_stage() {
    let dir = tempfile::tempdir().unwrap();
    let opp = dir.path().join("opp.json");
    std::fs::write(&opp, r#"{"owner":1,"kind":"schedule","stages":[[1,0],[0,1],[1,0],[0,1],[1,0],[0,1],[1,0],[0,1]]}"#).unwrap();
    let o = lowrand(&["exploit", "--game", "matching-pennies", "--n", "8", "--opponent", opp.to_str().unwrap()], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("stage,own_action,opponent_action,diagnostic,running_average"));
    assert_eq!(lines.count(), 8);
}

#[test]
fn seed_learner_needs_seeded_opponent() {
    let dir = tempfile::tempdir().unwrap();
    let opp = dir.path().join("opp.json");
    std::fs::write(&opp, r#"{"owner":1,"kind":"schedule","stages":[[1,0]]}"#).unwrap();
    let args = ["exploit", "--game", "matching-pennies", "--n", "1", "--opponent", opp.to_str().unwrap(), "--engine", "seed-learner"];
    let o = lowrand(&args, dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("seeded opponent"));
}

#[test]
fn experiments_are_deterministic_and_saved() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [a.path(), b.path()] {
        let o = lowrand(&["experiment", "cavU", "--seed", "3"], d);
        assert!(o.status.success());
    }
    let x = std::fs::read(a.path().join("cavU.csv")).unwrap();
    assert_eq!(x, std::fs::read(b.path().join("cavU.csv")).unwrap());
    assert!(a.path().join("cavU.summary.json").exists());
}

#[test]
fn unknown_experiment_and_game_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lowrand(&["experiment", "nope"], dir.path()).status.code(), Some(1));
    assert_eq!(lowrand(&["solve", "--game", "nope"], dir.path()).status.code(), Some(1));
    let list = stdout(&lowrand(&["experiment", "list"], dir.path()));
    assert_eq!(list.lines().count(), 9);
}

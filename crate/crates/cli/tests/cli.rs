use std::process::{Command, Output};

fn sprouts(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sprouts")).args(args).env_remove("SPROUTS_BASIS").output().unwrap()
}

fn stdout(o: &Output) -> &str {
    std::str::from_utf8(&o.stdout).unwrap().trim_end()
}

fn stderr(o: &Output) -> &str {
    std::str::from_utf8(&o.stderr).unwrap().trim_end()
}

#[test]
fn answers_go_to_stdout() {
    let o = sprouts(&["lives", "0.0.0.}]!"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "9");
    let o = sprouts(&["rct", "0.0.0.0.2.}]!", "--build"]);
    assert_eq!(stdout(&o), "0-0-W *0");
    let o = sprouts(&["moves", "0.}]!"]);
    assert_eq!(stdout(&o), "AB.}AB.}]!");
}

#[test]
fn exit_codes() {
    let bad = sprouts(&["parse", "0.0.}}!"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(stdout(&bad), "");
    assert!(stderr(&bad).starts_with("error: position:"));
    assert_eq!(stderr(&bad).lines().count(), 1);

    assert_eq!(sprouts(&["lives", "--nope", "0.}]!"]).status.code(), Some(2));
    assert_eq!(sprouts(&["ct-count", "--spots", "2", "--pos", "0.}]!"]).status.code(), Some(2));
    assert_eq!(sprouts(&["solve", "--spots", "2"]).status.code(), Some(2));

    let missing = sprouts(&["solve", "--spots", "2", "--basis", "/nonexistent/basis.txt"]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(stderr(&missing).starts_with("error: basis:"));

    let long = sprouts(&["ct-count", "--spots", "7"]);
    assert_eq!(long.status.code(), Some(1));
}

#[test]
fn budget_exhaustion_is_distinct() {
    let dir = tempfile::tempdir().unwrap();
    let basis = dir.path().join("b.txt");
    let basis = basis.to_str().unwrap();
    assert!(sprouts(&["basis", "--spots", "3", "--out", basis]).status.success());
    let o = sprouts(&["solve", "--spots", "9", "--basis", basis, "--budget-nodes", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stdout(&o), "?");
    let o = sprouts(&["solve", "--spots", "2", "--basis", basis]);
    assert_eq!(stdout(&o), "L");
}

#[test]
fn proof_files_round_trip_through_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let (basis, full, small) = (path("b.txt"), path("full.txt"), path("small.txt"));
    assert!(sprouts(&["basis", "--spots", "3", "--out", &basis]).status.success());
    assert_eq!(stdout(&sprouts(&["solve", "--spots", "5", "--basis", &basis, "--proof-out", &full])), "W");
    let o = sprouts(&["prune", "--proof", &full, "--out", &small, "--basis", &basis]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&sprouts(&["verify", "--proof", &small, "--basis", &basis])), "ok W");

    let other = path("other.txt");
    assert!(sprouts(&["basis", "--spots", "2", "--out", &other]).status.success());
    let o = sprouts(&["verify", "--proof", &small, "--basis", &other]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: verify:"));
}

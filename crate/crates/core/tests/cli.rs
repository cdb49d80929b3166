use std::process::{Command, Output};

fn swlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_swlab")).args(args).env("RUST_LOG", "error").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn help_lists_subcommands() {
    let o = swlab(&["--help"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for cmd in ["norms", "inflate", "q2-bound", "solve", "oracle-check"] {
        assert!(text.contains(cmd), "{cmd} missing from help");
    }
}

#[test]
fn norms_writes_csv() {
    let o = swlab(&["norms", "--regime", "qlt2", "--N", "2,3", "--q", "1", "--delta", "0.15", "--c", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(swlab::experiments::CSV_HEADER));
    assert_eq!(lines.count(), 2);
    assert!(stderr(&o).contains("PASS: data norms"));
}

#[test]
fn all_rows_rejected_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tiny.toml");
    std::fs::write(
        &cfg,
        "[grid]\nmemory_budget_mb = 0.5\n[case]\nregime = \"qlt2\"\nn_list = [3]\ndelta = 0.15\nq = 1.0\nc = 1\n",
    )
    .unwrap();
    let o = swlab(&["inflate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    let rows = swlab::experiments::parse_csv(&stdout(&o)).unwrap();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].rejected());
}

#[test]
fn bad_config_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "[grid]\nunknown_key = 3\n").unwrap();
    let o = swlab(&["norms", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("error"));

    let o = swlab(&["norms", "--config", "/nonexistent/swlab.toml"]);
    assert_eq!(o.status.code(), Some(1));
    let o = swlab(&["norms", "--regime", "qlt2"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn oracle_check_passes() {
    let o = swlab(&["oracle-check", "--pairs", "6"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS: oracle"));
}

#[test]
fn solve_check_passes() {
    let o = swlab(&["solve", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stderr(&o).contains("PASS: solver"));
}

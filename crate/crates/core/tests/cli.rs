use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const THREE_RESIDENTS: &str = include_str!("../fixtures/three_residents.hrlq");

fn popmatch(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_popmatch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn solve_three_residents() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.hrlq", THREE_RESIDENTS);
    let out = popmatch(&["solve", "--instance", &g, "--algo", "hrlq-popular"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "1 1\n2 2\n3 1\n");
    let out = popmatch(&["solve", "--instance", &g, "--algo", "gs-hosp"]);
    assert_eq!(stdout(&out), "1 1\n2 1\n");
}

#[test]
fn trace_is_written_and_replays() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.hrlq", THREE_RESIDENTS);
    let log = path(&dir, "trace.log");
    let out = popmatch(&["solve", "--instance", &g, "--algo", "hrlq-popular", "--trace", &log]);
    assert!(out.status.success());
    assert!(!fs::read_to_string(&log).unwrap().is_empty());
    let out = popmatch(&["solve", "--instance", &g, "--algo", "gs-res", "--trace", &log]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn verify_reports_witness() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.hrlq", THREE_RESIDENTS);
    let m1 = write(&dir, "m1.txt", "1 1\n2 1\n");
    let out = popmatch(&["verify", "--instance", &g, "--matching", &m1, "--property", "stable"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("property=stable verdict=holds"));
    let out = popmatch(&["verify", "--instance", &g, "--matching", &m1, "--property", "feasible"]);
    assert!(stdout(&out).starts_with("property=feasible verdict=fails"));

    let m3 = write(&dir, "m3.txt", "1 2\n2 1\n3 1\n");
    let w = path(&dir, "w.txt");
    let out = popmatch(&["verify", "--instance", &g, "--matching", &m3, "--property", "stable", "--witness", &w]);
    let text = stdout(&out);
    assert!(text.contains("verdict=fails") && text.contains("(r1,h1)"), "{text}");
}

#[test]
fn metrics_row() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.hrlq", THREE_RESIDENTS);
    let m2 = write(&dir, "m2.txt", "1 1\n2 2\n3 1\n");
    let m1 = write(&dir, "m1.txt", "1 1\n2 1\n");
    let out = popmatch(&["metrics", "--instance", &g, "--matching", &m2, "--baseline", &m1]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2);
    let header: Vec<&str> = text.lines().next().unwrap().split(',').collect();
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(header.len(), row.len());
}

#[test]
fn generate_is_deterministic_and_parsable() {
    let dir = TempDir::new().unwrap();
    let a = path(&dir, "a.hrlq");
    let b = path(&dir, "b.hrlq");
    for p in [&a, &b] {
        let out = popmatch(&["generate", "--residents", "200", "--hospitals", "10", "--lq", "--seed", "7", "--out", p]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    assert!(text.contains("seed=7"));
    assert!(popmatch::io::parse_instance(&text).unwrap().has_lower_quotas());
}

#[test]
fn experiment_csv() {
    let out = popmatch(&["experiment", "--kind", "hr", "--residents", "100", "--hospitals", "5,10", "--reps", "2"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 3);
    let again = popmatch(&["experiment", "--kind", "hr", "--residents", "100", "--hospitals", "5,10", "--reps", "2"]);
    assert_eq!(stdout(&again), text);
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let g = write(&dir, "g.hrlq", THREE_RESIDENTS);
    assert_eq!(popmatch(&["solve", "--instance", &g]).status.code(), Some(1));
    assert_eq!(popmatch(&["solve", "--instance", &g, "--algo", "nope"]).status.code(), Some(1));
    assert_eq!(popmatch(&["generate", "--residents", "10", "--hospitals", "2", "-k", "5"]).status.code(), Some(1));
    let missing = dir.path().join("missing.hrlq");
    assert!(!Path::new(&missing).exists());
    assert_eq!(popmatch(&["solve", "--instance", missing.to_str().unwrap(), "--algo", "gs-res"]).status.code(), Some(2));
    let bad = write(&dir, "bad.hrlq", "HRLQ 1\nresidents 1\n");
    assert_eq!(popmatch(&["solve", "--instance", &bad, "--algo", "gs-res"]).status.code(), Some(2));

    let infeasible = write(&dir, "inf.hrlq", "HRLQ 1\nresidents 1\nhospitals 2\nr 1 : 1\nh 1 0 1 : 1\nh 2 1 1 :\n");
    let out = popmatch(&["solve", "--instance", &infeasible, "--algo", "hrlq-popular"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn envy_free_absence_is_a_status() {
    let dir = TempDir::new().unwrap();
    // both hospitals need r1
    let g = write(&dir, "g.hrlq", "HRLQ 1\nresidents 1\nhospitals 2\nr 1 : 1 2\nh 1 1 1 : 1\nh 2 1 1 : 1\n");
    let out = popmatch(&["solve", "--instance", &g, "--algo", "envy-free-yokoi"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "status=NO_ENVY_FREE\n");
}

#[test]
fn hrc_ingest_warns_on_stderr() {
    let dir = TempDir::new().unwrap();
    let hrc = write(&dir, "x.hrc", "2 1\n1 1 1\n2\n1 1 1 2\n");
    let out = popmatch(&["ingest-hrc", "--input", &hrc]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("dropped (r2,h1)"), "{err}");
    assert!(err.contains("r2 has no acceptable hospital left"), "{err}");
    assert!(stdout(&out).starts_with("HRLQ 1\n"));
}

#[test]
fn fixtures_pass() {
    let out = popmatch(&["fixtures"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains(" 0 failed"));
}

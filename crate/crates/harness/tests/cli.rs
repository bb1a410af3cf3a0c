//! End-to-end CLI checks: exit codes, output routing, and the
//! enroll/verify database round trip.

use std::path::Path;
use std::process::{Command, Output};

fn tpsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpsim")).args(args).output().expect("spawn tpsim")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn missing_seed_is_a_config_error() {
    let out = tpsim(&["com-validate"]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("seed"), "{}", stderr(&out));
}

#[test]
fn unknown_config_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "seed=1\nbogus=2\n").unwrap();
    let out = tpsim(&["com-validate", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("bogus"), "{}", stderr(&out));
}

#[test]
fn unreadable_config_is_an_io_error() {
    let out = tpsim(&["com-validate", "--seed", "1", "--config", "/nonexistent/x.cfg"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unwritable_out_path_is_an_io_error() {
    let out = tpsim(&["com-validate", "--seed", "1", "--out", "/nonexistent/dir/out.csv"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn csv_goes_to_stdout_or_file_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.csv");
    let piped = tpsim(&["com-validate", "--seed", "7"]);
    assert_eq!(piped.status.code(), Some(0), "{}", stderr(&piped));
    let to_file = tpsim(&["com-validate", "--seed", "7", "--out", path.to_str().unwrap()]);
    assert_eq!(to_file.status.code(), Some(0), "{}", stderr(&to_file));
    assert_eq!(std::fs::read(&path).unwrap(), piped.stdout);
    let text = String::from_utf8(piped.stdout).unwrap();
    assert!(text.starts_with("config_hash,seed,"), "{text}");
}

fn enroll_small(db_path: &Path, seed: &str) {
    let out = tpsim(&[
        "enroll",
        "--seed",
        seed,
        "--users",
        "50",
        "--dim",
        "64",
        "--db",
        db_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn enroll_is_deterministic_and_verify_accepts_genuine_probe() {
    let dir = tempfile::tempdir().unwrap();
    let db_a = dir.path().join("a.db");
    let db_b = dir.path().join("b.db");
    enroll_small(&db_a, "31");
    enroll_small(&db_b, "31");
    assert_eq!(std::fs::read(&db_a).unwrap(), std::fs::read(&db_b).unwrap());

    // regenerate user 5's enrollment vector from the same stream the
    // enroller used: a noiseless genuine probe scores exactly S_t
    let mut rng = tpsim_core::rng::derive_rng(31, &["enroll-db"], 5);
    let source = tpsim_core::Gaussian::new(0.5f64.sqrt()).unwrap();
    use tpsim_core::SymmetricDistribution;
    let probe: Vec<String> = (0..64).map(|_| source.sample(&mut rng).to_string()).collect();
    let probe_path = dir.path().join("probe.txt");
    std::fs::write(&probe_path, probe.join("\n")).unwrap();

    let out = tpsim(&[
        "verify",
        "--db",
        db_a.to_str().unwrap(),
        "--user",
        "5",
        "--probe",
        probe_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    // alpha_t = 0.1, L = 64 -> S_t = 6, threshold 3
    assert_eq!(text.trim(), "decision=accept score=6 threshold=3");
}

#[test]
fn verify_unknown_user_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("a.db");
    enroll_small(&db, "31");
    let probe_path = dir.path().join("probe.txt");
    std::fs::write(&probe_path, vec!["0.0"; 64].join(" ")).unwrap();
    let out = tpsim(&[
        "verify",
        "--db",
        db.to_str().unwrap(),
        "--user",
        "999",
        "--probe",
        probe_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("unknown user"), "{}", stderr(&out));
}

#[test]
fn verify_rejects_malformed_probe() {
    let dir = tempfile::tempdir().unwrap();
    let db = dir.path().join("a.db");
    enroll_small(&db, "31");
    let probe_path = dir.path().join("probe.txt");
    std::fs::write(&probe_path, "1.0 banana 2.0").unwrap();
    let out = tpsim(&[
        "verify",
        "--db",
        db.to_str().unwrap(),
        "--user",
        "0",
        "--probe",
        probe_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
}

#[test]
fn threads_flag_does_not_change_output() {
    let a = tpsim(&["attack-demo", "--seed", "3", "--threads", "1"]);
    let b = tpsim(&["attack-demo", "--seed", "3", "--threads", "4"]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
}

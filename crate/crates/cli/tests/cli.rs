use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bqp(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bqp")).arg("-o").arg(dir).args(args).output().expect("spawn bqp")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn value_at(csv: &str, x: f64) -> f64 {
    csv.lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split(',').map(|s| s.parse::<f64>().unwrap());
            (it.next().unwrap(), it.next().unwrap())
        })
        .find(|(xi, _)| (xi - x).abs() < 1e-12)
        .map(|(_, v)| v)
        .expect("node present")
}

#[test]
fn stationary_midpoint_at_eps0() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bqp(tmp.path(), &["--eps-factor", "1.0", "stationary"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("stationary.csv")).unwrap();
    assert!((value_at(&csv, 0.5) - 0.5).abs() < 1e-6);
    let m = read_json(&tmp.path().join("manifest.json"));
    assert_eq!(m["status"], "ok");
    assert_eq!(m["command"], "stationary");
    assert_eq!(m["eps_factor"], 1.0);
}

#[test]
fn selftest_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bqp(tmp.path(), &["selftest"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(!stdout.contains("FAIL"));
    assert!(tmp.path().join("selftest.json").exists());
}

#[test]
fn stationary_file_has_zero_quasi_potential() {
    let tmp = tempfile::tempdir().unwrap();
    let st = tmp.path().join("st");
    assert!(bqp(&st, &["-n", "101", "stationary"]).status.success());
    let qp = tmp.path().join("qp");
    let file = st.join("stationary.csv");
    let out = bqp(&qp, &["quasipotential", "--density-file", file.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let q = read_json(&qp.join("quasipotential.json"));
    assert!(q["s_eps"].as_f64().unwrap().abs() < 1e-8, "{q}");
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bqp(tmp.path(), &["--eps", "0.1", "--eps-factor", "0.2", "stationary"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bqp(tmp.path(), &["--rho0", "0.9", "stationary"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bqp(tmp.path(), &["quasipotential", "--density", "wiggle:3"]);
    assert_eq!(out.status.code(), Some(2));
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"grid": 3}"#).unwrap();
    let out = bqp(tmp.path(), &["--config", cfg.to_str().unwrap(), "stationary"]);
    assert_eq!(out.status.code(), Some(2));
    let out = bqp(tmp.path(), &["no-such-command"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_errors_exit_1_with_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bqp(tmp.path(), &["--eps-factor", "0.9", "-n", "101", "transition"]);
    assert_eq!(out.status.code(), Some(1));
    let m = read_json(&tmp.path().join("manifest.json"));
    assert_eq!(m["status"], "error");
    assert!(m["error"].as_str().unwrap().contains("coincide"));
}

#[test]
fn reruns_are_bit_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["-n", "81", "--rng-seed", "7", "fixed-points", "--density", "sine:0.5:0.2:2"];
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    let c = tmp.path().join("c");
    assert!(bqp(&a, &args).status.success());
    assert!(bqp(&b, &args).status.success());
    let mut seq = vec!["--sequential"];
    seq.extend_from_slice(&args);
    assert!(bqp(&c, &seq).status.success());
    for f in ["fixed_points.json", "fixed_point_00.csv", "density.csv"] {
        let fa = std::fs::read(a.join(f)).unwrap();
        assert_eq!(fa, std::fs::read(b.join(f)).unwrap(), "{f}");
        assert_eq!(fa, std::fs::read(c.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn path_round_trips_through_action_check() {
    let tmp = tempfile::tempdir().unwrap();
    let p = tmp.path().join("p");
    let out = bqp(&p, &["-n", "81", "path", "--density", "sine:0.5:0.15:1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rec = read_json(&p.join("path/path.json"));
    let ac = tmp.path().join("ac");
    let dir = p.join("path");
    let out = bqp(&ac, &["-n", "81", "action-check", "--path-dir", dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let check = read_json(&ac.join("action_check.json"));
    assert_eq!(check["action_recorded"], rec["action"]);
    assert!(check["relative_difference"].as_f64().unwrap() < 1e-2, "{check}");
}

#[test]
fn scans_write_one_row_per_factor() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bqp(tmp.path(), &["-n", "81", "gamma-scan", "--density", "sine:0.5:0.2:1", "--eps-factors", "0.4,0.2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(tmp.path().join("gamma.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.starts_with("eps,eps_factor,s_eps,s_inviscid"));
}

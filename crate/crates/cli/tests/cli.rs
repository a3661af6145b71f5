use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use sha2::{Digest, Sha256};

const HEADER: &str =
    "t,tau,gamma0,lambda,g,P_I,CP_I,NM1,NM2,d,lhs_p,rhs_p,ok_p,ok_p_strict,lhs_cp,rhs_cp,ok_cp,singular";

/// Coarse optimizer settings that keep each run well under a second.
const FAST: [&str; 8] = ["--grid-theta", "8", "--grid-phi", "6", "--grid-r", "4", "--family", "0.01:0.99:21"];

fn divlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_divlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn sweep_in(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["sweep", "--out-dir", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    divlab(&args)
}

#[test]
fn degenerate_sweep_writes_one_row_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = sweep_in(dir.path(), &["--t-min", "0", "--t-max", "0"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0], HEADER);
    assert!(lines[1].starts_with("0,0.01,2,2,"));

    let manifest: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["records"], 1);
    for name in ["sweep.csv", "summary.json"] {
        let bytes = std::fs::read(dir.path().join(name)).unwrap();
        let digest = hex::encode(Sha256::digest(&bytes));
        assert_eq!(manifest["digests"][name], digest.as_str());
    }
    let summary: Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("summary.json")).unwrap()).unwrap();
    let rec = &summary["records"][0];
    for key in ["t", "p_i", "cp_i", "nm1", "nm2", "d", "lhs_p", "rhs_p", "ok_p", "ok_p_strict", "ok_cp"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn family_must_be_markovian_but_target_need_not_be() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec!["--gamma0", "1.5", "--lambda", "2", "--t-max", "0.5", "--dt", "0.25"];
    args.extend_from_slice(&FAST[..6]);
    args.extend_from_slice(&["--family", "0.01:0.99:99"]);
    let out = sweep_in(dir.path(), &args);
    assert!(out.status.success(), "{}", stderr(&out));

    let out = sweep_in(dir.path(), &["--family", "0.5:1.5:3"]);
    assert_eq!(out.status.code(), Some(2));
    let msg = stderr(&out);
    assert_eq!(msg.trim_end().lines().count(), 1, "{msg}");
    assert!(msg.contains("lambda / 2"));
}

#[test]
fn bad_config_values_fail_with_one_line() {
    let dir = tempfile::tempdir().unwrap();
    for args in [&["--dt", "0"][..], &["--t-min", "-1"], &["--gamma0", "-2"], &["--tau", "0"], &["--grid-r", "1"]] {
        let out = sweep_in(dir.path(), args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert_eq!(stderr(&out).trim_end().lines().count(), 1, "{args:?}");
    }
    // An output directory that is a regular file.
    let blocker = dir.path().join("blocker");
    std::fs::write(&blocker, "x").unwrap();
    let out = sweep_in(&blocker, &["--t-max", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(
        &cfg,
        format!(
            "# short run\ntau = 0.02\nt_max = 0.5\ndt = 0.5\ngrid_theta = 6\ngrid_phi = 4\ngrid_r = 3\nfamily_n = 11\nout_dir = {}\nseed = 3\n",
            dir.path().join("from-file").display()
        ),
    )
    .unwrap();
    let out = divlab(&["sweep", "--config", cfg.to_str().unwrap(), "--dt", "0.25"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let csv = std::fs::read_to_string(dir.path().join("from-file/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 3);
    assert!(csv.lines().nth(1).unwrap().starts_with("0,0.02,"));

    std::fs::write(&cfg, "speed = 3\n").unwrap();
    let out = divlab(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unknown key"));
}

fn probe(args: &[&str]) -> Value {
    let mut all = vec!["probe"];
    all.extend_from_slice(args);
    let out = divlab(&all);
    assert!(out.status.success(), "{}", stderr(&out));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn probe_examples() {
    let rec = probe(&["--t", "0", "--tau", "0.01", "--gamma0", "0.5", "--lambda", "2"]);
    assert_eq!(rec["p_i"], 0.0);
    assert_eq!(rec["cp_i"], 0.0);
    assert_eq!(rec["singular"], false);

    let rec = probe(&["--t", "2.356194490192345"]);
    assert_eq!(rec["singular"], true);
    assert!(rec["p_i"].is_null() && rec["ok_p"].is_null());

    let rec = probe(&["--t", "0", "--tau", "1e-9"]);
    for key in ["p_i", "cp_i", "nm1", "nm2"] {
        assert!(rec[key].as_f64().unwrap() <= 1e-6, "{key}: {}", rec[key]);
    }
}

fn gamma_rows(args: &[&str]) -> Vec<Vec<String>> {
    let mut all = vec!["gamma"];
    all.extend_from_slice(args);
    let out = divlab(&all);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,gamma,G"));
    lines.map(|l| l.split(',').map(String::from).collect()).collect()
}

#[test]
fn gamma_table_examples() {
    let rows = gamma_rows(&["--t-max", "0"]);
    assert_eq!(rows, vec![vec!["0", "0", "1"]]);

    let half_pi = std::f64::consts::FRAC_PI_2.to_string();
    let rows = gamma_rows(&["--t-min", &half_pi, "--t-max", &half_pi]);
    let gamma: f64 = rows[0][1].parse().unwrap();
    assert!((gamma - 4.0).abs() < 1e-9);

    for row in gamma_rows(&["--gamma0", "0.5", "--lambda", "2"]) {
        assert!(row[1].parse::<f64>().unwrap() >= 0.0);
    }

    let pole = (3.0 * std::f64::consts::FRAC_PI_4).to_string();
    let rows = gamma_rows(&["--t-min", &pole, "--t-max", &pole]);
    assert_eq!(rows[0][1], "");
    assert!(rows[0][2].parse::<f64>().unwrap().abs() < 1e-12);
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let mut args = vec!["--t-min", "2.2", "--t-max", "2.6", "--dt", "0.05"];
    args.extend_from_slice(&FAST);
    assert!(sweep_in(a.path(), &args).status.success());
    let out = Command::new(env!("CARGO_BIN_EXE_divlab"))
        .env("DIVLAB_THREADS", "1")
        .args(["sweep", "--out-dir", b.path().to_str().unwrap()])
        .args(&args)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr(&out));
    for name in ["sweep.csv", "summary.json"] {
        let x = std::fs::read(a.path().join(name)).unwrap();
        let y = std::fs::read(b.path().join(name)).unwrap();
        assert_eq!(x, y, "{name} differs");
    }
}

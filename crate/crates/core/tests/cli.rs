//! Drives the `gradflow` binary end to end.

use std::path::Path;
use std::process::{Command, Output};

fn gradflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gradflow"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn configs() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/configs"))
}

#[test]
fn fig2a_writes_csv_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = gradflow(&[
        "fig2a",
        "--out",
        dir.path().to_str().unwrap(),
        "--seed",
        "7",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("status = PASS"), "{stdout}");

    let mut rdr = csv::Reader::from_path(dir.path().join("fig2a.csv")).unwrap();
    let header: Vec<String> = rdr.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(
        header,
        [
            "t",
            "z_norm",
            "u_err_norm",
            "x_err_norm",
            "bound",
            "event",
            "w_dot_norm"
        ]
    );
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert!(rows.len() > 1000);
    let last_t: f64 = rows.last().unwrap()[0].parse().unwrap();
    assert!((last_t - 80.0).abs() < 1e-9);
    assert!(dir.path().join("fig2a.report.txt").exists());
}

#[test]
fn simulate_respects_restart_policy_flag() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = configs().join("truncation.toml");
    let out = gradflow(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--restart-policy",
        "global",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = std::fs::read_to_string(dir.path().join("trajectory.report.txt")).unwrap();
    assert!(report.contains("restart_policy = global"), "{report}");
}

#[test]
fn certify_prints_conditions() {
    let cfg = configs().join("fig2a.toml");
    let out = gradflow(&["certify", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in [
        "eta_max",
        "kappa1",
        "epsilon_threshold",
        "all_conditions = true",
    ] {
        assert!(text.contains(key), "missing {key}:\n{text}");
    }
}

#[test]
fn bad_config_exits_with_2_and_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    std::fs::write(
        &path,
        "[plant]\npreset = \"benchmark4\"\n[cost]\npreset = \n",
    )
    .unwrap();
    let out = gradflow(&["certify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));

    let text = "[plant]\npreset = \"benchmark4\"\n[cost]\npreset = \"benchmark4\"\n[simulation]\neta = -1.0\n\
                disturbance = { kind = \"constant\", value = [0.0, 0.0, 0.0, 0.0] }\n";
    std::fs::write(&path, text).unwrap();
    let out = gradflow(&["certify", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));
}

#[test]
fn selftest_passes() {
    let out = gradflow(&["selftest"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(out.status.success(), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 12);
}

#[test]
fn sample_configs_load() {
    for entry in std::fs::read_dir(configs()).unwrap() {
        let path = entry.unwrap().path();
        let cfg = gradflow::config::load_config(&path).unwrap();
        cfg.build()
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn tfatom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tfatom"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn correction_z1_reports_headline_value() {
    let out = tfatom(&["correction", "--z", "1"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["unit"], "hartree");
    let c: f64 = v["c"].as_str().unwrap().parse().unwrap();
    assert!((c - 0.04907).abs() < 5e-5, "c = {c}");
    let de = v["corrections"][0]["delta_e_closed"].as_f64().unwrap();
    assert!((de + c).abs() < 1e-12);
}

#[test]
fn correction_ev_flag_scales_output() {
    let out = tfatom(&["correction", "--z", "2", "--ev"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["unit"], "eV");
    let de = v["corrections"][0]["delta_e_closed"].as_f64().unwrap();
    let c: f64 = v["c"].as_str().unwrap().parse().unwrap();
    assert!((de + c * 2f64.powf(5.0 / 3.0) * 27.211386).abs() < 1e-6);
}

#[test]
fn sweep_scaling_is_structural() {
    let out = tfatom(&["sweep", "--z", "1,2,3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.trim_end().lines().collect();
    assert_eq!(lines[0], "Z,deltaE_closed,deltaE_oracle");
    assert_eq!(lines.len(), 4);
    let mut ratios = Vec::new();
    for line in &lines[1..] {
        let cols: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        ratios.push(cols[1] / cols[0].powf(5.0 / 3.0));
    }
    assert!((ratios[1] / ratios[0] - 1.0).abs() < 1e-12);
    assert!((ratios[2] / ratios[0] - 1.0).abs() < 1e-12);
}

#[test]
fn sweep_range_spec_and_output_file() {
    let dir = std::env::temp_dir().join("tfatom_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("sweep.csv");
    let out = tfatom(&["sweep", "--z", "2:4", "--out", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 4);
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn solve_csv_grid() {
    let out = tfatom(&["solve", "--format", "csv", "--xmax", "40"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,f,fprime");
    let last = text.trim_end().lines().last().unwrap();
    let cols: Vec<f64> = last.split(',').map(|s| s.parse().unwrap()).collect();
    assert!((cols[0] - 40.0).abs() < 1e-9);
    assert!(cols[1] > 0.0 && cols[1] < 0.01);
}

#[test]
fn moments_json_identities() {
    let out = tfatom(&["moments"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let m_norm = v["m_norm"].as_f64().unwrap();
    let m_slope = v["m_slope"].as_f64().unwrap();
    let b: f64 = v["B"].as_str().unwrap().parse().unwrap();
    assert!((m_norm - 1.0).abs() < 1e-4);
    assert!((m_slope + b).abs() < 1e-4);
}

#[test]
fn deterministic_output() {
    let a = tfatom(&["solve", "--format", "csv"]);
    let b = tfatom(&["solve", "--format", "csv"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        ["correction", "--z", "0.5"].as_slice(),
        ["sweep", "--z", "abc"].as_slice(),
        ["sweep", "--z", "5:2"].as_slice(),
    ] {
        let out = tfatom(args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
    // clap-level parse failure also maps to usage error
    let out = tfatom(&["correction"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_overrides() {
    let dir = std::env::temp_dir().join("tfatom_cli_test");
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("tf.conf");
    std::fs::write(&cfg, "x_max = 30\n# comment\n").unwrap();
    let out = tfatom(&["--config", cfg.to_str().unwrap(), "solve", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let last = text.trim_end().lines().last().unwrap();
    let x: f64 = last.split(',').next().unwrap().parse().unwrap();
    assert!((x - 30.0).abs() < 1e-9);

    std::fs::write(&cfg, "bogus = 1\n").unwrap();
    let out = tfatom(&["--config", cfg.to_str().unwrap(), "solve"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_file(&cfg).unwrap();
}

#[test]
fn missing_config_file_is_an_io_error() {
    let out = tfatom(&["--config", "/nonexistent/tf.conf", "solve"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!Path::new("/nonexistent/tf.conf").exists());
}

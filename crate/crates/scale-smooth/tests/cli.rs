//! End-to-end behaviour of the `scale-smooth` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_scale-smooth");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("SCALE_SMOOTH_SEED").output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn rows(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect()
}

const TWO_STEP: &str = "time,income\n-2,3\n-0.5,2\n0,2\n";

#[test]
fn constant_income_is_preserved_everywhere() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "c.csv", "time,income\r\n2001,7.5\r\n2004,7.5\r\n2010,7.5\r\n");
    let input = input.to_str().unwrap();
    let out = run(&["smooth", "--input", input, "--scales", "0,0.1,1,10", "--r", "-0.3"]);
    assert!(out.status.success());
    let table = rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(table.len(), 12);
    assert!(table.iter().all(|r| (r[2] - 7.5).abs() <= 1e-9), "{table:?}");

    let out = run(&["compare-exponential", "--input", input, "--scales", "0.5,50"]);
    assert!(out.status.success());
    for row in rows(std::str::from_utf8(&out.stdout).unwrap()) {
        for v in &row[1..4] {
            assert!((v - 7.5).abs() <= 1e-9, "{row:?}");
        }
    }
}

#[test]
fn larger_scales_smooth_more() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", TWO_STEP);
    let out = run(&["smooth", "--input", input.to_str().unwrap(), "--r", "0.5", "--scales", "0.1,1,10"]);
    assert!(out.status.success());
    let table = rows(std::str::from_utf8(&out.stdout).unwrap());
    let spread = |t: f64| {
        let vals: Vec<f64> = table.iter().filter(|r| r[0] == t).map(|r| r[2]).collect();
        assert!(vals.iter().all(|&v| (2.0 - 1e-9..=3.0 + 1e-9).contains(&v)));
        vals.iter().cloned().fold(f64::MIN, f64::max) - vals.iter().cloned().fold(f64::MAX, f64::min)
    };
    assert!(spread(0.1) > spread(1.0) && spread(1.0) > spread(10.0));
}

#[test]
fn input_errors_exit_2_with_line() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text, needle) in [
        ("empty.csv", "", ":1:"),
        ("order.csv", "time,income\n1,2\n3,4\n2,5\n", ":4:"),
        ("junk.csv", "time,income\n1,x\n", ":2:"),
    ] {
        let input = write(dir.path(), name, text);
        let out = run(&["smooth", "--input", input.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).contains(needle), "{name}");
    }
    assert_eq!(run(&["smooth"]).status.code(), Some(2));
    assert_eq!(run(&["weights", "--scales", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn compare_exponential_requires_positive_drift() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", TWO_STEP);
    let out = run(&["compare-exponential", "--input", input.to_str().unwrap(), "--r", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn compare_exponential_large_scale_limit() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", "time,income\n-4,-6\n-2.5,9\n-1,1.5\n-0.2,4\n0,4\n");
    let out = run(&["compare-exponential", "--input", input.to_str().unwrap(), "--r", "0.5", "--scales", "0.001,200"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("scale,kernel,exponential,flat,kernel_minus_exponential"));
    let table = rows(&text);
    // kernel at t = 200 matches exponential smoothing within 1e-3 max|f|
    assert!(table[1][4].abs() <= 1e-3 * 9.0, "{table:?}");
    // t = 0.001 only sees the last segment, value 4
    assert!((table[0][1] - 4.0).abs() < 1e-6);
}

#[test]
fn weights_curves_and_companions() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("w.csv");
    let out = run(&["weights", "--r", "0.5", "--scales", "1", "--output", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    let kernel = rows(&std::fs::read_to_string(&out_path).unwrap());
    assert_eq!(kernel.len(), 4001);
    let trapezoid: f64 = kernel.windows(2).map(|w| 0.5 * (w[1][1] - w[0][1]) * (w[0][2] + w[1][2])).sum();
    assert!((trapezoid - 1.0).abs() <= 1e-6, "{trapezoid}");
    assert!(dir.path().join("w.gaussian.csv").exists());
    let stationary = rows(&std::fs::read_to_string(dir.path().join("w.stationary.csv")).unwrap());
    assert!(stationary.iter().all(|r| r[0].is_infinite() && (r[2] - (r[1]).exp()).abs() < 1e-15));

    let neg = dir.path().join("n.csv");
    let out = run(&["weights", "--r", "-0.5", "--scales", "1", "--output", neg.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
    assert!(!dir.path().join("n.stationary.csv").exists());
}

#[test]
fn json_envelope_echoes_config() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", TWO_STEP);
    let out = run(&[
        "smooth",
        "--input",
        input.to_str().unwrap(),
        "--format",
        "json",
        "--scales",
        "1",
        "--time-unit",
        "month",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["config"]["time_unit"], "month");
    assert_eq!(v["config"]["scales"][0], 1.0);
    let present = v["results"][0]["present"].as_f64().unwrap();
    assert!(present > 2.0 && present < 3.0);
}

#[test]
fn outputs_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "s.csv", "time,income\n-3.3,1e-3\n-1.7,12345.678\n-0.1,-0.5\n0,2\n");
    let args = ["smooth", "--input", input.to_str().unwrap(), "--r", "0.7", "--scales", "0.3,3"];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for line in text.lines().skip(1) {
        for field in line.split(',') {
            let v: f64 = field.parse().unwrap();
            assert_eq!(scale_smooth::io::format_value(v), field);
        }
    }
}

#[test]
fn verify_quick_passes_and_fault_is_caught() {
    let out = run(&["verify", "--quick"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let report = String::from_utf8(out.stdout).unwrap();
    assert!(report.starts_with("property,measured,tolerance,pass\n"));

    let out = run(&["verify", "--quick", "--inject-fault", "kernel-sign"]);
    assert_eq!(out.status.code(), Some(1));
    let report = String::from_utf8(out.stdout).unwrap();
    let semigroup = report.lines().find(|l| l.starts_with("semigroup,")).unwrap();
    assert!(semigroup.ends_with(",false"));
}

#[test]
fn verify_is_reproducible_under_env_seed() {
    let go = |seed: &str| {
        Command::new(BIN)
            .args(["verify", "--quick", "--seed", "1"])
            .env("SCALE_SMOOTH_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    let (a, b, c) = (go("42"), go("42"), go("43"));
    assert_eq!(a, b);
    assert_ne!(a, c);
}

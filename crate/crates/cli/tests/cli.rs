use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fractal-calc");
const GAMMA: f64 = 0.920_550_143_773_635_2;

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("run binary")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let k = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(k).unwrap().parse().unwrap()).collect()
}

#[test]
fn cantor_lists_every_level() {
    let csv = stdout(&["cantor", "--depth", "6"]);
    // 2 + 4 + ... + 64 intervals
    assert_eq!(csv.lines().count(), 1 + 126);
    let csv = stdout(&["cantor", "--depth", "1"]);
    assert_eq!(csv, "level,index,a,b\n1,0,0,0.4\n1,1,0.6,1\n");
}

#[test]
fn chi_takes_two_values() {
    let csv = stdout(&["chi", "--alpha", "0.756470797366", "--points", "101"]);
    let values = column(&csv, "chi");
    assert_eq!(values.len(), 101);
    for v in values {
        assert!(v == 0.0 || (v - 1.0 / GAMMA).abs() < 1e-9, "{v}");
    }
}

#[test]
fn staircase_is_monotone_and_reaches_total_mass() {
    let csv = stdout(&["staircase", "--depth", "10"]);
    let s = column(&csv, "s");
    assert!(s.windows(2).all(|w| w[1] >= w[0]));
    assert!((s.last().unwrap() - GAMMA).abs() < 1e-9);
}

#[test]
fn json_format_is_an_array_of_rows() {
    let text = stdout(&["cantor", "--depth", "1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 2);
    assert_eq!(v[1]["a"], 0.6);
}

#[test]
fn demo_oscillator_conserves_energy() {
    let csv = stdout(&["demo", "oscillator", "--depth", "8", "--dtau", "0.01"]);
    for l in column(&csv, "lyapunov") {
        assert!((l - 0.5).abs() < 1e-9, "{l}");
    }
}

#[test]
fn demo_decay_runs_two_initial_values() {
    let csv = stdout(&["demo", "decay", "--depth", "8", "--dtau", "0.01", "--classical"]);
    let runs = column(&csv, "run");
    assert!(runs.contains(&0.0) && runs.contains(&1.0));
    assert!(csv.lines().next().unwrap().ends_with("lyapunov_classical"));
}

#[test]
fn stability_report_for_first_order_system() {
    let text = stdout(&["stability", "--depth", "6", "--system", r#"{"kind":"first_order","g":"-y"}"#]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["stability"]["classification"], "exponentially-stable");
    assert_eq!(v["lyapunov_definiteness"]["pass"], true);
}

#[test]
fn invalid_input_exits_with_usage_code() {
    assert_eq!(run(&["cantor", "--mu", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "--system", "{not json"]).status.code(), Some(2));
    assert_eq!(
        run(&["stability", "--format", "csv", "--system", r#"{"kind":"first_order","g":"-y"}"#]).status.code(),
        Some(2)
    );
}

#[test]
fn blow_up_exits_with_numerical_code() {
    let out = run(&["solve", "--depth", "6", "--system", r#"{"kind":"first_order","g":"y^3","y0":2}"#]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn depth_cap_from_environment_clamps() {
    let out = Command::new(BIN)
        .args(["cantor", "--depth", "9"])
        .env("FRACTAL_CALC_MAX_DEPTH", "3")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).lines().count(), 1 + 2 + 4 + 8);
    assert!(!out.stderr.is_empty());
}

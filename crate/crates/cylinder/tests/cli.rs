//! End-to-end tests of the `cylinder` binary: spawn the real executable,
//! parse its JSON/CSV output, and check exit codes, determinism, and the
//! documented result values.

use std::path::Path;
use std::process::{Command, Output};

fn cylinder(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cylinder"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(
        out.status.success(),
        "exit {:?}\nstderr: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn oracle_stays_within_a_percent_of_the_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let out = cylinder(&[
        "oracle",
        "--seed",
        "7",
        "--t-max",
        "5",
        "--dt",
        "1e-3",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["command"], "oracle");
    assert_eq!(v["config"]["seed"], "7");
    let max_abs = v["result"]["max_abs_err"].as_f64().unwrap();
    assert!(max_abs <= 1e-2, "max abs err {max_abs}");
    let csv = std::fs::read_to_string(dir.path().join("oracle.csv")).unwrap();
    assert!(csv.starts_with("t,rho_closed,rho_numeric,abs_err\n"));
    assert!(Path::new(&dir.path().join("report.json")).exists());
    assert!(Path::new(&dir.path().join("run.log")).exists());
}

#[test]
fn curves_on_the_example_find_one_circle_of_winding_one() {
    let out = cylinder(&[
        "curves",
        "--system",
        "example",
        "--seed",
        "7",
        "--dt",
        "0.01",
        "--s-resolution",
        "64",
        "--fiber-seeds",
        "8",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["r"], 1);
    assert_eq!(v["result"]["taus"][0], 1);
    let period = v["result"]["period_per_curve"][0].as_f64().unwrap();
    assert!(
        (period - 6.2832).abs() < 1e-3,
        "period {period} should be one revolution"
    );
}

#[test]
fn verify_on_the_example_carries_curves_across_one_revolution() {
    let out = cylinder(&[
        "verify",
        "--system",
        "example",
        "--seed",
        "7",
        "--shift",
        "6.2832",
        "--dt",
        "0.01",
        "--s-resolution",
        "32",
        "--fiber-seeds",
        "8",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["tau_match"], true);
    assert_eq!(v["result"]["r_match"], true);
    // The requested shift snaps onto the revolution-aligned grid.
    let snapped = v["result"]["shift"].as_f64().unwrap();
    assert!((snapped - std::f64::consts::TAU).abs() < 1e-9);
    assert_eq!(v["result"]["shift_requested"].as_f64().unwrap(), 6.2832);
}

#[test]
fn pullback_converges_toward_the_attractor() {
    let out = cylinder(&[
        "pullback",
        "--system",
        "example",
        "--seed",
        "11",
        "--dt",
        "0.01",
        "--horizons",
        "1,2,3,4,5,10,20",
    ]);
    let v = stdout_json(&out);
    let errors: Vec<f64> = v["result"]["errors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e.as_f64().unwrap())
        .collect();
    assert_eq!(errors.len(), 6);
    assert_eq!(v["result"]["converged"], true);
    assert!(errors.last().unwrap() < &1e-3);
    let rate = v["result"]["rate_estimate"].as_f64().unwrap();
    assert!(rate < -0.5, "decay rate {rate} should be clearly negative");
}

#[test]
fn lyapunov_reports_exponent_and_contraction_for_the_sinusoid() {
    let out = cylinder(&[
        "lyapunov",
        "--system",
        "tracked-sinusoid",
        "--seeds",
        "3,4",
        "--dt",
        "0.004",
        "--t-max",
        "10",
    ]);
    let v = stdout_json(&out);
    let exponent = v["result"]["exponent"].as_f64().unwrap();
    let ln2 = std::f64::consts::LN_2;
    assert!(
        (exponent + ln2).abs() < 1e-9,
        "exponent {exponent} vs -ln 2"
    );
    let lambda = v["result"]["contraction"]["lambda_hat"].as_f64().unwrap();
    assert!((lambda - 0.5).abs() < 1e-9);
    // No closed form for fixtures: the ergodic cross-check is absent.
    assert!(v["result"]["ergodic_average"].is_null());
    assert_eq!(v["result"]["per_seed"][0]["seed"], 3);
}

#[test]
fn lyapunov_on_the_example_cross_checks_ergodically() {
    // Short horizon: this is a wiring test, not a precision test.
    let out = cylinder(&[
        "lyapunov",
        "--system",
        "example",
        "--seeds",
        "5",
        "--dt",
        "0.01",
        "--t-max",
        "60",
    ]);
    let v = stdout_json(&out);
    let exponent = v["result"]["exponent"].as_f64().unwrap();
    assert!(
        (exponent + 2.0).abs() < 0.8,
        "exponent {exponent} should be near -2"
    );
    let ergodic = v["result"]["ergodic_average"].as_f64().unwrap();
    assert!(
        (ergodic + 2.0).abs() < 0.8,
        "ergodic average {ergodic} should be near -2"
    );
}

#[test]
fn reruns_are_byte_identical_and_the_report_copy_matches_stdout() {
    let dir1 = tempfile::tempdir().unwrap();
    let dir2 = tempfile::tempdir().unwrap();
    let args = |dir: &str| {
        vec![
            "curves".to_string(),
            "--system".into(),
            "double-well".into(),
            "--seed".into(),
            "3".into(),
            "--dt".into(),
            "0.004".into(),
            "--s-resolution".into(),
            "32".into(),
            "--out".into(),
            dir.to_string(),
        ]
    };
    let a1: Vec<String> = args(dir1.path().to_str().unwrap());
    let a2: Vec<String> = args(dir2.path().to_str().unwrap());
    let out1 = Command::new(env!("CARGO_BIN_EXE_cylinder"))
        .args(&a1)
        .output()
        .unwrap();
    let out2 = Command::new(env!("CARGO_BIN_EXE_cylinder"))
        .args(&a2)
        .output()
        .unwrap();
    assert!(out1.status.success() && out2.status.success());

    // Same bytes on stdout up to the echoed output directory, which is the
    // only difference between the two configurations. Normalize it away.
    let norm = |bytes: &[u8], dir: &str| String::from_utf8_lossy(bytes).replace(dir, "OUT");
    assert_eq!(
        norm(&out1.stdout, dir1.path().to_str().unwrap()),
        norm(&out2.stdout, dir2.path().to_str().unwrap())
    );
    // CSV tables do not embed the configuration: identical bytes.
    let csv1 = std::fs::read(dir1.path().join("curves.csv")).unwrap();
    let csv2 = std::fs::read(dir2.path().join("curves.csv")).unwrap();
    assert_eq!(csv1, csv2);
    // The report copy is exactly what stdout carried.
    let report = std::fs::read(dir1.path().join("report.json")).unwrap();
    assert_eq!(report, out1.stdout);
}

#[test]
fn identical_invocations_hash_identically_and_overrides_change_the_hash() {
    let base = cylinder(&["curves", "--system", "double-well", "--dt", "0.004", "--s-resolution", "32"]);
    let same = cylinder(&["curves", "--system", "double-well", "--dt", "0.004", "--s-resolution", "32"]);
    let other = cylinder(&[
        "curves",
        "--system",
        "double-well",
        "--dt",
        "0.004",
        "--s-resolution",
        "32",
        "--seed",
        "8",
    ]);
    assert_eq!(base.stdout, same.stdout);
    let h = |out: &Output| stdout_json(out)["config_hash"].as_str().unwrap().to_string();
    assert_eq!(h(&base), h(&same));
    assert_ne!(h(&base), h(&other));
}

#[test]
fn numerical_failures_exit_one_with_a_json_error() {
    // A gap floor far above the well separation leaves the fiber
    // unresolvable: a numerical-condition failure, not a usage error.
    let out = cylinder(&[
        "curves",
        "--system",
        "double-well",
        "--seed",
        "3",
        "--dt",
        "0.004",
        "--gap-floor",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).expect("stderr is JSON");
    assert_eq!(err["schema_version"], 1);
    assert_eq!(err["error"]["kind"], "fiber_unresolved");
    assert!(err["error"]["message"].as_str().unwrap().len() > 10);
}

#[test]
fn usage_and_configuration_problems_exit_two() {
    let out = cylinder(&["curves", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cylinder(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cylinder(&["curves", "--system", "no-such-system"]);
    assert_eq!(out.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"]["kind"], "config");

    let out = cylinder(&["simulate", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));

    let out = cylinder(&["simulate", "--t-max", "-3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_sets_defaults_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(
        &conf,
        "system = double-well\nseed = 9\ndt = 0.004\ns_resolution = 32\n",
    )
    .unwrap();
    let out = cylinder(&[
        "curves",
        "--config",
        conf.to_str().unwrap(),
        "--seed",
        "11",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["config"]["system"], "double-well");
    assert_eq!(v["config"]["seed"], "11");
    assert_eq!(v["config"]["dt"], "0.004");
    assert_eq!(v["result"]["r"], 2);

    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "sedd = 9\n").unwrap();
    let out = cylinder(&["curves", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn parameter_files_select_and_tune_a_family() {
    let dir = tempfile::tempdir().unwrap();
    let sys = dir.path().join("slow-sinusoid.conf");
    // Weaker contraction than the default: the curve is still found.
    std::fs::write(&sys, "family = tracked-sinusoid\nkappa = 0.5\n").unwrap();
    let out = cylinder(&[
        "curves",
        "--system",
        sys.to_str().unwrap(),
        "--seed",
        "5",
        "--dt",
        "0.004",
        "--s-resolution",
        "32",
    ]);
    let v = stdout_json(&out);
    assert_eq!(v["result"]["r"], 1);
    assert_eq!(v["result"]["taus"][0], 1);
    let lambda = v["result"]["lambda"].as_f64().unwrap();
    assert!(
        (lambda - (-0.5f64).exp()).abs() < 0.05,
        "per-winding contraction {lambda} should be near exp(-1/2)"
    );
}

#[test]
fn simulate_streams_the_trajectory_as_csv() {
    let out = cylinder(&[
        "simulate",
        "--system",
        "half-twist",
        "--seed",
        "2",
        "--dt",
        "0.01",
        "--t-max",
        "2",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,s_lift,y_1,y_2");
    assert_eq!(lines.len(), 202);
    let last: Vec<f64> = lines[201]
        .split(',')
        .map(|c| c.parse().unwrap())
        .collect();
    assert_eq!(last[0], 2.0);
    assert!((last[1] - 2.0).abs() < 1e-12, "two revolutions in two units");
}

#[test]
fn curves_csv_stream_matches_the_curve_table() {
    let out = cylinder(&[
        "curves",
        "--system",
        "double-well",
        "--seed",
        "3",
        "--dt",
        "0.004",
        "--s-resolution",
        "16",
        "--format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "s,y_1,curve_id,tau");
    // Two flat curves, 16 points each.
    assert_eq!(lines.len(), 33);
    assert!(lines[1].ends_with(",0,1"));
    assert!(lines[32].ends_with(",1,1"));
}

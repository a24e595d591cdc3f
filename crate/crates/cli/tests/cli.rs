//! End-to-end tests of the `emi` binary: output formats, exit codes, and
//! result-file persistence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn emi(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_emi"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).to_string()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).to_string()
}

fn write_csv(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path
}

fn config_path(name: &str) -> String {
    format!("{}/../../configs/{name}", env!("CARGO_MANIFEST_DIR"))
}

// ---------------------------------------------------------------------------
// rate
// ---------------------------------------------------------------------------

#[test]
fn rate_hand_value() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n0\n");
    let y = write_csv(dir.path(), "y.csv", "1\n1\n");
    let out = emi(&["rate", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "0.346574 nats\n");
}

#[test]
fn rate_zero_output_block() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n-2\n0.5\n");
    let y = write_csv(dir.path(), "y.csv", "0\n0\n0\n");
    let out = emi(&["rate", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "0.000000 nats\n");
}

#[test]
fn rate_deterministic_dependence_prints_inf() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n2\n3\n");
    let out = emi(&["rate", x.to_str().unwrap(), x.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "inf\n");
}

#[test]
fn rate_bits_flag() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n0\n");
    let y = write_csv(dir.path(), "y.csv", "1\n1\n");
    let out = emi(&["rate", "--bits", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(stdout(&out), "0.346574 nats (0.500000 bits)\n");
}

#[test]
fn rate_json_record() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n0\n");
    let y = write_csv(dir.path(), "y.csv", "1\n1\n");
    let out = emi(&["rate", "--json", x.to_str().unwrap(), y.to_str().unwrap()]);
    let record: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let nats = record["nats"].as_f64().unwrap();
    assert!((nats - 0.5 * std::f64::consts::LN_2).abs() < 1e-12);
    assert_eq!(record["infinite"], false);
    assert_eq!(record["pruned_input"], false);
}

#[test]
fn rate_dimension_mismatch_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1\n0\n");
    let y = write_csv(dir.path(), "y.csv", "1\n1\n1\n");
    let out = emi(&["rate", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 3);
}

#[test]
fn rate_malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let x = write_csv(dir.path(), "x.csv", "1,banana\n0,1\n");
    let y = write_csv(dir.path(), "y.csv", "1\n1\n");
    let out = emi(&["rate", x.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    let missing = dir.path().join("missing.csv");
    let out = emi(&["rate", missing.to_str().unwrap(), y.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
}

#[test]
fn rate_covariance_flag_equals_precentered_run() {
    let dir = tempfile::tempdir().unwrap();
    // Column with mean 2 and its centered counterpart.
    let x_off = write_csv(dir.path(), "x_off.csv", "3\n1\n2\n2\n");
    let x_ctr = write_csv(dir.path(), "x_ctr.csv", "1\n-1\n0\n0\n");
    let y_off = write_csv(dir.path(), "y_off.csv", "0\n2\n-1\n-1\n");
    let y_ctr = write_csv(dir.path(), "y_ctr.csv", "0\n2\n-1\n-1\n");
    let with_flag = emi(&[
        "rate",
        "--covariance",
        x_off.to_str().unwrap(),
        y_off.to_str().unwrap(),
    ]);
    let centered = emi(&[
        "rate",
        "--covariance",
        x_ctr.to_str().unwrap(),
        y_ctr.to_str().unwrap(),
    ]);
    assert_eq!(stdout(&with_flag), stdout(&centered));
}

// ---------------------------------------------------------------------------
// bounds
// ---------------------------------------------------------------------------

#[test]
fn bounds_spot_values() {
    let out = emi(&[
        "bounds", "--n", "100", "--t", "1", "--r", "1", "--gamma", "0.5", "--threshold", "0.2",
        "--rate-emp", "1.0", "--pe", "0.01",
    ]);
    assert_eq!(exit_code(&out), 0);
    let text = stdout(&out);
    let value_of = |prefix: &str| -> f64 {
        text.lines()
            .find(|l| l.starts_with(prefix))
            .unwrap_or_else(|| panic!("missing line {prefix}: {text}"))
            .split(" = ")
            .nth(1)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert_eq!(value_of("gamma_limit"), 0.99);
    assert!((value_of("tail_constant") - 0.57569).abs() < 1e-4);
    assert!((value_of("tail_bound") - 2.614e-3).abs() < 1e-5);
    assert!((value_of("rate_threshold") - 0.41342).abs() < 1e-4);
}

#[test]
fn bounds_without_gamma_prints_only_the_limit() {
    let out = emi(&["bounds", "--n", "4", "--t", "2", "--r", "2"]);
    assert_eq!(exit_code(&out), 0);
    assert_eq!(stdout(&out), "gamma_limit = 0.250000\n");
}

#[test]
fn bounds_invalid_gamma_exits_2() {
    let out = emi(&["bounds", "--n", "4", "--t", "2", "--r", "2", "--gamma", "0.3"]);
    assert_eq!(exit_code(&out), 2);
    assert!(stderr(&out).contains("admissible range"));
}

// ---------------------------------------------------------------------------
// experiment
// ---------------------------------------------------------------------------

#[test]
fn experiment_smoke_writes_all_result_files() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = emi(&[
        "experiment",
        "--config",
        &config_path("tail_bound_smoke.json"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
    for name in ["report.json", "points.csv", "manifest.json"] {
        assert!(out_dir.join(name).exists(), "{name} missing");
    }
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    for key in ["config", "points", "verdicts", "manifest"] {
        assert!(report.get(key).is_some(), "report missing key {key}");
    }
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("manifest.json")).unwrap())
            .unwrap();
    assert_eq!(manifest["resolved_seed"], 7);
    assert!(manifest["output_paths"].as_array().unwrap().len() == 3);
}

#[test]
fn experiment_csv_reproducible_across_seeded_runs_and_threads() {
    let dir = tempfile::tempdir().unwrap();
    let mut csvs = Vec::new();
    for (label, threads) in [("a", "1"), ("b", "4"), ("c", "4")] {
        let out_dir = dir.path().join(label);
        let out = emi(&[
            "experiment",
            "--config",
            &config_path("tail_bound_smoke.json"),
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(exit_code(&out), 0, "stderr: {}", stderr(&out));
        csvs.push(fs::read(out_dir.join("points.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1], "thread count changed the results");
    assert_eq!(csvs[1], csvs[2], "identical reruns diverged");
}

#[test]
fn experiment_csv_and_json_carry_identical_numbers() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = emi(&[
        "experiment",
        "--config",
        &config_path("tail_bound_smoke.json"),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 0);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    let points = report["points"].as_array().unwrap();
    let csv = fs::read_to_string(out_dir.join("points.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(points.len(), rows.len());
    for (point, row) in points.iter().zip(rows) {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(point["point_id"].as_str().unwrap(), fields[0]);
        for (key, field) in [("x", 1), ("empirical", 2), ("ci_halfwidth", 3)] {
            let json_value = point[key].as_f64().unwrap();
            let csv_value: f64 = fields[field].parse().unwrap();
            assert_eq!(json_value, csv_value, "{key} differs");
        }
        match point["analytic"].as_f64() {
            Some(json_value) => {
                let csv_value: f64 = fields[4].parse().unwrap();
                assert_eq!(json_value, csv_value);
            }
            None => assert!(fields[4].is_empty()),
        }
    }
}

#[test]
fn experiment_invalid_gamma_names_the_constraint() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    fs::write(
        &config,
        r#"{"experiment":"tail_bound","n":4,"t":2,"r":2,"gamma":0.3,"trials":10,"seed":1}"#,
    )
    .unwrap();
    let out = emi(&["experiment", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 2);
    assert!(
        stderr(&out).contains("1 - (t+r-1)/n"),
        "stderr: {}",
        stderr(&out)
    );
}

#[test]
fn experiment_cap_exceeded_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("huge.json");
    fs::write(
        &config,
        r#"{"experiment":"random_coding","n":100,"gamma":0.5,"rate_nats":1.0,
           "target_error":0.1,"channel":{"variant":"identity","antennas":1},
           "trials":1,"seed":1}"#,
    )
    .unwrap();
    let out = emi(&["experiment", "--config", config.to_str().unwrap()]);
    assert_eq!(exit_code(&out), 4);
}

#[test]
fn experiment_verdict_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("strict.json");
    // An absurdly tight tolerance makes the convergence verdict fail.
    fs::write(
        &config,
        r#"{"experiment":"convergence","n":100,
           "channel":{"variant":"awgn_mimo","h":[[1.0]],"noise_variance":1.0},
           "trials":5,"seed":1,"relative_tolerance":1e-12}"#,
    )
    .unwrap();
    let out_dir = dir.path().join("run");
    let out = emi(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(exit_code(&out), 1);
    assert!(out_dir.join("points.csv").exists(), "results still written");
}

#[test]
fn experiment_missing_config_exits_2() {
    let out = emi(&["experiment", "--config", "/nonexistent/nope.json"]);
    assert_eq!(exit_code(&out), 2);
}

//! End-to-end tests of the `coulomb-gas` binary: the three commands, the
//! document shapes, the exit code contract, and byte determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const CANONICAL: &str = r#"{
    "species": [
        {"charge": 1, "activity": 0.5},
        {"charge": -1, "activity": 0.5}
    ],
    "geometry": {"kind": "lattice", "dimension": 1, "side": 1.0, "spacing": 0.25},
    "ensemble": {"beta": 0.2, "elementary_charge": 1.0},
    "kernel": {"t": 0.0}
}"#;

const CONTINUUM: &str = r#"{
    "species": [
        {"charge": 1, "activity": 0.4},
        {"charge": -1, "activity": 0.4}
    ],
    "geometry": {"kind": "continuum", "dimension": 1, "side": 1.0},
    "ensemble": {"beta": 0.3, "elementary_charge": 1.0},
    "kernel": {"t": 0.1}
}"#;

fn write_config(dir: &TempDir, text: &str) -> PathBuf {
    let path = dir.path().join("run.json");
    std::fs::write(&path, text).unwrap();
    path
}

/// Run the binary with a scrubbed environment so an ambient
/// COULOMB_GAS_THREADS cannot change what a test observes.
fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coulomb-gas"))
        .args(args)
        .env_remove("COULOMB_GAS_THREADS")
        .output()
        .unwrap()
}

fn stdout_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stdout).unwrap()
}

fn stderr_json(output: &Output) -> Value {
    serde_json::from_slice(&output.stderr).unwrap()
}

#[test]
fn compute_reports_the_apparatus() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CANONICAL);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(out.stderr.is_empty());

    let doc = stdout_json(&out);
    assert_eq!(doc["c0"].as_f64().unwrap(), 0.0);
    assert_eq!(doc["u0"].as_f64().unwrap(), 0.0);
    assert!((doc["volume"].as_f64().unwrap() - 1.0).abs() <= 1e-15);
    // Xi0 = I_0(1) for this ring.
    assert!((doc["xi0"]["value"].as_f64().unwrap() - 1.2660658777520084).abs() <= 1e-14);
    assert_eq!(doc["eta"].as_array().unwrap().len(), 2);
    assert!(doc["correlation_length"].as_f64().unwrap() > 0.0);
    assert!(doc["density"].as_f64().unwrap() > 0.0);
    assert!(doc["xi2"]["value"].as_f64().unwrap() > 1.0);
    assert!(doc.get("debye_huckel").is_none());
}

#[test]
fn compute_honors_the_zero_cutoff_request() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL.replacen("\"kernel\"", "\"debye_huckel\": true, \"kernel\"", 1);
    let config = write_config(&dir, &text);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let doc = stdout_json(&out);
    assert!(doc["debye_huckel"]["value"].as_f64().unwrap() > 0.0);
}

#[test]
fn compute_writes_the_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CANONICAL);
    let report = dir.path().join("report.json");
    let out = run(&[
        "compute",
        "--config",
        config.to_str().unwrap(),
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());

    // The file carries exactly the bytes stdout would have carried.
    let direct = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(std::fs::read(&report).unwrap(), direct.stdout);
}

#[test]
fn reports_are_byte_deterministic_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CANONICAL);
    let args = ["verify", "--config", config.to_str().unwrap()];
    let baseline = run(&args);
    assert_eq!(baseline.status.code(), Some(0));
    assert_eq!(run(&args).stdout, baseline.stdout);

    for threads in ["1", "4"] {
        let out = Command::new(env!("CARGO_BIN_EXE_coulomb-gas"))
            .args(args)
            .env("COULOMB_GAS_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(out.stdout, baseline.stdout, "threads = {threads}");
    }
}

#[test]
fn verify_certifies_the_bound() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CANONICAL);
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let doc = stdout_json(&out);
    assert!(doc["pass"].as_bool().unwrap());
    let exact = doc["xi_exact"]["value"].as_f64().unwrap();
    let xi0 = doc["xi0"]["value"].as_f64().unwrap();
    let xi2 = doc["xi2"]["value"].as_f64().unwrap();
    assert!(xi2 <= exact && exact <= xi0);
    assert!(doc["slack"].as_f64().unwrap() > 0.0);
    assert!(doc["relative_slack"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_rejects_continuum_geometry() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CONTINUUM);
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    let doc = stderr_json(&out);
    assert_eq!(doc["exit_code"].as_u64().unwrap(), 2);
    assert!(doc["error"].as_str().unwrap().contains("lattice"));
}

#[test]
fn sweep_tabulates_the_grid() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL.replacen(
        "\"kernel\"",
        "\"sweep\": {\"variables\": [{\"name\": \"z\", \"values\": [0.2, 0.4]}]}, \"kernel\"",
        1,
    );
    let config = write_config(&dir, &text);
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let table = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = table.split("\r\n").collect();
    assert_eq!(lines[0], "z,xi0,eta1,correlation_length,density,xi2,xi_exact");
    assert_eq!(lines.len(), 4, "header, two rows, trailing empty");
    assert_eq!(lines[3], "");
    for row in &lines[1..3] {
        let fields: Vec<&str> = row.split(',').collect();
        assert_eq!(fields.len(), 7);
        // A four-site lattice fits the default budget, so the exact
        // column is filled, and every field parses back to a float.
        for field in fields {
            field.parse::<f64>().unwrap();
        }
    }
}

#[test]
fn sweep_leaves_the_exact_column_blank_off_lattice() {
    let dir = tempfile::tempdir().unwrap();
    let text = CONTINUUM.replacen(
        "\"kernel\"",
        "\"sweep\": {\"variables\": [{\"name\": \"beta\", \"values\": [0.3]}]}, \"kernel\"",
        1,
    );
    let config = write_config(&dir, &text);
    let out = run(&["sweep", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let table = String::from_utf8(out.stdout).unwrap();
    let row = table.split("\r\n").nth(1).unwrap();
    assert!(row.ends_with(','), "exact column should be empty: {row}");
}

#[test]
fn malformed_config_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, "{not json");
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let doc = stderr_json(&out);
    assert_eq!(doc["exit_code"].as_u64().unwrap(), 2);
    assert!(doc["error"].as_str().unwrap().contains("invalid config"));
}

#[test]
fn unknown_config_field_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL.replacen("\"kernel\"", "\"kenrel\"", 1);
    let config = write_config(&dir, &text);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nope.json");
    let out = run(&["compute", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"].as_str().unwrap().contains("cannot read config"));
}

#[test]
fn lopsided_gas_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL.replacen("\"charge\": -1", "\"charge\": 2", 1);
    let config = write_config(&dir, &text);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"].as_str().unwrap().contains("symmetriz"));
}

#[test]
fn u0_convention_off_dimension_exits_3() {
    // The infinite-volume self-energy constant exists only for d > 2.
    let dir = tempfile::tempdir().unwrap();
    let text = CONTINUUM
        .replacen("\"dimension\": 1", "\"dimension\": 2", 1)
        .replacen("\"t\": 0.1", "\"t\": 0.5, \"u0\": \"infinite_volume\"", 1);
    let config = write_config(&dir, &text);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stderr_json(&out)["exit_code"].as_u64().unwrap(), 3);
}

#[test]
fn continuum_without_cutoff_is_rejected() {
    // t = 0 off the lattice is only summable in d = 1, and there the
    // default mode tolerance is unreachable; both turn into clean errors
    // rather than a silent divergence.
    let dir = tempfile::tempdir().unwrap();
    let d2 = CONTINUUM
        .replacen("\"dimension\": 1", "\"dimension\": 2", 1)
        .replacen("\"t\": 0.1", "\"t\": 0.0", 1);
    let config = write_config(&dir, &d2);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let d1 = CONTINUUM.replacen("\"t\": 0.1", "\"t\": 0.0", 1);
    let config = write_config(&dir, &d1);
    let out = run(&["compute", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr_json(&out)["error"].as_str().unwrap().contains("modes"));
}

#[test]
fn exhausted_work_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let text = CANONICAL.replacen("\"kernel\"", "\"work_budget\": 10, \"kernel\"", 1);
    let config = write_config(&dir, &text);
    let out = run(&["verify", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let doc = stderr_json(&out);
    assert_eq!(doc["exit_code"].as_u64().unwrap(), 4);
    assert!(doc["error"].as_str().unwrap().contains("budget"));
}

#[test]
fn garbage_thread_count_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(&dir, CANONICAL);
    let out = Command::new(env!("CARGO_BIN_EXE_coulomb-gas"))
        .args(["compute", "--config", config.to_str().unwrap()])
        .env("COULOMB_GAS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_json(&out)["error"].as_str().unwrap().contains("COULOMB_GAS_THREADS"));
}

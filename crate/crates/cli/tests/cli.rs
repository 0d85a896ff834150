use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_foliate"))
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn without_time(mut v: Value) -> Value {
    v.as_object_mut().unwrap().remove("wall_time");
    v
}

#[test]
fn verify_batch_passes() {
    let out = run(&["verify", "--random", "--seed", "1", "--count", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 200);
    for r in results {
        assert!(r["bb_residual"].as_f64().unwrap() < 1e-8, "{r}");
        assert_eq!(r["pass"], Value::Bool(true));
    }
    assert!(report["errors"].as_array().unwrap().is_empty());
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &["indices", "--random", "--seed", "5", "--count", "3"][..],
        &["fiber-search", "--random", "--seed", "2", "--restarts", "3"][..],
        &["holonomy", "--random", "--seed", "3", "--point", "1"][..],
    ] {
        let a = without_time(json(&run(args)));
        let b = without_time(json(&run(args)));
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    }
}

#[test]
fn dicritical_input_is_rejected() {
    let path = fixture("dicritical.json");
    let out = run(&["singular", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["errors"][0]["code"], "DicriticalAtInfinity");
}

#[test]
fn malformed_file_is_rejected_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"degree\": 2,\n  \"P\": [[0, 0],,]\n}").unwrap();
    let out = run(&["indices", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report = json(&out);
    assert_eq!(report["errors"][0]["code"], "ParseError");
    assert!(report["errors"][0]["message"].as_str().unwrap().contains("line 3"));
}

#[test]
fn separable_fixture_reports_singular_values() {
    let path = fixture("separable.json");
    let out = run(&["rank", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let sigma = report["results"][0]["jacobian"]["singular_values"].as_array().unwrap();
    assert_eq!(sigma.len(), 6);
}

#[test]
fn csv_matches_json_numbers() {
    let args = ["verify", "--random", "--seed", "9", "--count", "2"];
    let report = json(&run(&args));
    let csv_out = run(&[&args[..], &["--csv"]].concat());
    let text = String::from_utf8(csv_out.stdout).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    for (row, r) in rows.iter().zip(report["results"].as_array().unwrap()) {
        let bb: f64 = row[3].parse().unwrap();
        assert_eq!(bb, r["bb_residual"].as_f64().unwrap());
    }
}

#[test]
fn darboux_scan_parses_grids() {
    let out = run(&["darboux-scan", "--alpha", "2,0.5", "--k-grid", "0.7;1.3,0.2"]);
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    let scan = &report["results"][0];
    assert_eq!(scan["members"].as_array().unwrap().len(), 2);
    assert!(scan["max_split_distance"].as_f64().unwrap() < 1e-8);
    let bad = run(&["darboux-scan", "--k-grid", "1:2"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn missing_input_is_a_usage_error() {
    assert_eq!(run(&["verify"]).status.code(), Some(2));
}

#[test]
fn written_field_reads_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("f.json");
    let v = foliate::sampling::random_field(11, 2);
    let file = foliate::io::FieldFile::from_field(&v, Some("seed 11".into()), Some(11));
    foliate::io::write_field_file(&path, &file).unwrap();
    let from_file = json(&run(&["indices", "--input", path.to_str().unwrap()]));
    let from_seed = json(&run(&["indices", "--random", "--seed", "11"]));
    assert_eq!(from_file["results"][0]["moduli"], from_seed["results"][0]["moduli"]);
}

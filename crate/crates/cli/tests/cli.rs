use std::path::PathBuf;
use std::process::{Command, Output};

use monogamy_core::classical::kcbs_expression;
use monogamy_core::quantum::kcbs_min_eigenvalue;
use monogamy_core::{nd_optimum, Behavior, Sense};
use serde_json::Value;

fn monogamy(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_monogamy")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("monogamy-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn bounds_table() {
    let o = monogamy(&["bounds"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    let get = |q: &str, col: usize| rows.iter().find(|r| r[0] == q).unwrap()[col].parse::<f64>().unwrap();
    assert_eq!(get("kappa", 1), -3.0);
    assert_eq!(get("kappa+beta", 2), -5.0);
    assert!((get("kappa", 3) - kcbs_min_eigenvalue()).abs() < 1e-11);
    assert_eq!(rows.len(), 13);
}

#[test]
fn bounds_json_matches_library() {
    let o = monogamy(&["bounds", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let kappa = v.as_array().unwrap().iter().find(|r| r["quantity"] == "kappa").unwrap();
    let lib = nd_optimum(&kcbs_expression(), Sense::Min).unwrap().value;
    assert_eq!(kappa["no_disturbance"].as_f64().unwrap(), lib);
}

#[test]
fn verify_default_passes() {
    let o = monogamy(&["verify", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
    assert_eq!(v["samples"], 100_000);
}

#[test]
fn verify_names_block_structure_under_fault_injection() {
    let o = monogamy(&["verify", "--samples", "100", "--perturb-m", "1e-3"]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("block-structure"), "{err}");
}

#[test]
fn verify_is_seed_stable() {
    let a = monogamy(&["verify", "--samples", "3000", "--seed", "9", "--format", "json"]);
    let b = monogamy(&["verify", "--samples", "3000", "--seed", "9", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let c = monogamy(&["verify", "--samples", "3000", "--seed", "10", "--format", "json"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn sweep_is_byte_identical_per_seed() {
    let a = monogamy(&["sweep", "--samples", "5000", "--seed", "1", "--format", "json"]);
    let b = monogamy(&["sweep", "--samples", "5000", "--seed", "1", "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(v["monogamy_violations"].as_array().unwrap().len(), 0);
    assert!(v["sum_min"].as_f64().unwrap() >= -5.0 - 1e-9);
}

#[test]
fn region_files() {
    let dir = scratch("region");
    let o = monogamy(&["region", "--samples", "300", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let boundary = std::fs::read_to_string(dir.join("boundary.csv")).unwrap();
    assert!(boundary.starts_with("branch,phi,theta,chsh,kcbs\n"));
    let rows = csv_rows(&boundary);
    assert_eq!(rows.len(), 4 * 300);
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r[3].parse().unwrap(), r[4].parse().unwrap())).collect();
    let kmin = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    assert!((kmin - (5.0 - 4.0 * 5f64.sqrt())).abs() < 1e-6);
    assert!(pts.iter().all(|(c, k)| c + k >= -5.0 - 1e-9));

    let touch = csv_rows(&std::fs::read_to_string(dir.join("touching_point.csv")).unwrap());
    let (c, k): (f64, f64) = (touch[0][3].parse().unwrap(), touch[0][4].parse().unwrap());
    assert!((c + 2.08).abs() < 0.01 && (k + 2.92).abs() < 0.01);
    let line = csv_rows(&std::fs::read_to_string(dir.join("nd_line.csv")).unwrap());
    assert!(line.iter().all(|r| (r[0].parse::<f64>().unwrap() + r[1].parse::<f64>().unwrap() + 5.0).abs() < 1e-12));

    let again = scratch("region-again");
    monogamy(&["region", "--samples", "300", "--out", again.to_str().unwrap()]);
    assert_eq!(boundary, std::fs::read_to_string(again.join("boundary.csv")).unwrap());
}

#[test]
fn region_json_bundle() {
    let dir = scratch("region-json");
    let o = monogamy(&["region", "--samples", "20", "--format", "json", "--out", dir.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("region.json")).unwrap()).unwrap();
    assert_eq!(v["boundary"].as_array().unwrap().len(), 80);
    assert_eq!(v["touching_point"]["point"]["branch"], "plus");
}

#[test]
fn exit_codes() {
    assert_eq!(monogamy(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(monogamy(&["sweep", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(monogamy(&["sweep", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(monogamy(&["region"]).status.code(), Some(2));
    assert_eq!(monogamy(&["region", "--samples", "1", "--out", "/tmp"]).status.code(), Some(2));
    assert_eq!(monogamy(&["spectra", "--out", "/nonexistent-dir/spectra.csv"]).status.code(), Some(3));
    assert_eq!(monogamy(&["certify", "--input", "/nonexistent-file.json"]).status.code(), Some(3));
}

#[test]
fn certify_round_trip() {
    let dir = scratch("certify");
    let good = dir.join("uniform.json");
    std::fs::write(&good, Behavior::uniform().to_json().unwrap()).unwrap();
    let o = monogamy(&["certify", "--input", good.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["at_most_one_violated"], true);

    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\"A1,A2,B1\": [1.0]}").unwrap();
    assert_eq!(monogamy(&["certify", "--input", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn witness_and_operators() {
    let o = monogamy(&["nd-witness", "--expr", "kcbs"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 80);
    let o = monogamy(&["operators", "--format", "json"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["M"]["dim"], 3);
    assert_eq!(v["chsh"]["dim"], 6);
    let o = monogamy(&["spectra"]);
    assert_eq!(csv_rows(&stdout(&o)).len(), 15);
}

//! End-to-end runs of the `circumpoly` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circumpoly"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (i32, String) {
    let path = dir.join(file);
    let mut all: Vec<&str> = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--out", &p]);
    let out = run(&all);
    let code = out.status.code().unwrap();
    (code, fs::read_to_string(&path).unwrap_or_default())
}

#[test]
fn gap_bytes_do_not_depend_on_threads() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["gap", "--body", "disk", "--dim", "2", "--n", "64,128,256", "--trials", "150", "--seed", "7"];
    let (c1, a) = run_to(dir.path(), "a.csv", &[&args[..], &["--threads", "1"]].concat());
    let (c2, b) = run_to(dir.path(), "b.csv", &[&args[..], &["--threads", "3"]].concat());
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let data: Vec<&str> = a.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(data[0], "n,mean,stderr,trials,rejected,functional,body,dim,seed");
    assert_eq!(data.len(), 4);
    assert!(data[1].starts_with("64,"));
    assert!(data[1].ends_with(",150,0,width,disk,2,7"));
    let side = fs::read_to_string(dir.path().join("a.csv.manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&side).unwrap();
    assert!(v["wall_time_seconds"].as_f64().unwrap() >= 0.0);
    assert_eq!(v["threads"], 1);
}

#[test]
fn volume_rows_for_a_simplex() {
    let out = run(&["gap", "--body", "simplex", "--dim", "3", "--functional", "volume", "--n", "60,120", "--trials", "20"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| l.contains(",volume,")).collect();
    assert_eq!(rows.len(), 2);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["gap", "--dim", "2", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--body", "blob", "--dim", "2", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["gap", "--body", "disk", "--n", "2"]).status.code(), Some(2));
    assert_eq!(run(&["check", "--which", "eq14", "--n", "10"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn eq14_check_reports_both_sides() {
    let out = run(&["check", "--which", "eq14", "--body", "triangle", "--n", "60", "--trials", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["pass"], true);
    let row = &v["rows"][0];
    assert!(row["width_gap"]["mean"].as_f64().unwrap() > 0.0);
    assert!(row["complement"]["stderr"].as_f64().unwrap() > 0.0);
    assert_eq!(v["manifest"]["command"], "check");
}

#[test]
fn fit_compares_with_predicted_constant() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("g.csv");
    let csv_s = csv.to_str().unwrap();
    let out = run(&["gap", "--body", "triangle", "--n", "100,300,1000,3000,10000", "--trials", "100", "--out", csv_s]);
    assert!(out.status.success());
    let out = run(&["fit", "--in", csv_s, "--law", "width", "--body", "triangle"]);
    assert!(matches!(out.status.code(), Some(0 | 1)));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["predicted"]["width"], 4.0);
    assert!(v["check"]["ratio"].as_f64().unwrap() > 0.0);
    let out = run(&["fit", "--in", csv_s, "--law", "width", "--exponent"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["exponent"].as_f64().unwrap() < 0.0);
    // Volume has no constant to compare.
    assert_eq!(run(&["fit", "--in", csv_s, "--law", "volume", "--body", "triangle"]).status.code(), Some(2));
}

#[test]
fn vertex_file_bodies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square.txt");
    fs::write(&path, "# a square\n2 4\n1 1\n-1 1\n-1 -1\n1 -1\n").unwrap();
    let spec = format!("file:{}", path.display());
    let out = run(&["faces", "--body", &spec, "--n", "50", "--trials", "20"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains(",vertices,"));
    assert!(text.contains(",facets,"));
}

#[test]
fn moments_row() {
    let out = run(&["moments", "--dim", "3", "--q", "2", "--samples", "100000", "--seed", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let row = text.lines().last().unwrap();
    let mean: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
    assert!((mean - 1.0 / 72.0).abs() < 1e-3, "{row}");
}

#[test]
fn ballmax_and_extremality_verdicts() {
    let out = run(&["ballmax", "--bodies", "disk,triangle", "--n", "20", "--trials", "3000"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["reference"], "disk");
    let out = run(&["check", "--which", "extremality", "--dim", "3", "--samples", "20000"]);
    assert_eq!(out.status.code(), Some(0));
}

use std::path::Path;
use std::process::{Command, Output};

use shiftsdp::bench::mordell_instance;
use shiftsdp::poly::{AnyPop, ProblemFile};
use shiftsdp::sdp::import_sdpa;

const BINARY_QP: &str = r#"{
  "field": "real",
  "n": 2,
  "objective": [[1.0, [1, 1]]],
  "constraints": [
    {"type": "eq", "terms": [[1.0, [2, 0]], [-1.0, [0, 0]]]},
    {"type": "eq", "terms": [[1.0, [0, 2]], [-1.0, [0, 0]]]}
  ]
}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shiftsdp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_problem(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn report(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON report")
}

#[test]
fn build_prints_sizes() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_problem(dir.path(), "qp.json", BINARY_QP);
    let out = run(&["build", "--input", &input, "--r", "1", "--s", "1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = report(&out);
    assert_eq!(doc["relaxation"]["r"], 1);
    assert_eq!(doc["relaxation"]["method"], "S-LAS(s=1)");
    assert!(doc["variables"].as_u64().unwrap() > 0);
}

#[test]
fn solve_binary_qp() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_problem(dir.path(), "qp.json", BINARY_QP);
    let out = run(&["solve", "--input", &input, "--r", "2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = report(&out);
    assert_eq!(doc["status"], "optimal");
    assert!((doc["bound"].as_f64().unwrap() + 1.0).abs() < 1e-6);
    assert_eq!(doc["certificate"]["certified"], true);
}

#[test]
fn zero_order_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_problem(dir.path(), "qp.json", BINARY_QP);
    let out = run(&["solve", "--input", &input, "--r", "0"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--r"));
}

#[test]
fn bad_inputs_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.json");
    assert_eq!(run(&["build", "--input", missing.to_str().unwrap()]).status.code(), Some(1));
    let broken = write_problem(dir.path(), "broken.json", "{\"field\": \"real\"");
    assert_eq!(run(&["build", "--input", &broken]).status.code(), Some(1));
    assert_eq!(run(&["solve", "--bogus"]).status.code(), Some(1));
}

#[test]
fn export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_problem(dir.path(), "qp.json", BINARY_QP);
    let dat = dir.path().join("qp.dat-s");
    let out = run(&["export", "--input", &input, "--r", "2", "--out", dat.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let lmi = import_sdpa(&dat).unwrap();
    let text = std::fs::read_to_string(&dat).unwrap();
    assert_eq!(text.lines().next().unwrap().trim(), lmi.m.to_string());
    assert_eq!(shiftsdp::sdp::to_sdpa_string(&lmi), text);
}

#[test]
fn extract_from_external_vector() {
    let dir = tempfile::tempdir().unwrap();
    let input = write_problem(dir.path(), "qp.json", BINARY_QP);
    let prepared = {
        let file = ProblemFile::read(&input).unwrap();
        shiftsdp::pipeline::prepare(&file.problem, &shiftsdp::pipeline::RelaxationSpec::las(2)).unwrap()
    };
    let sol = shiftsdp::ipm::solve(&prepared.lmi, &Default::default()).unwrap();
    let vec: Vec<String> = sol.x.iter().map(|v| format!("{v:.17e}")).collect();
    let xfile = dir.path().join("x.txt");
    std::fs::write(&xfile, vec.join("\n")).unwrap();
    let out = run(&[
        "extract",
        "--input",
        &input,
        "--r",
        "2",
        "--solution",
        xfile.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = report(&out);
    assert_eq!(doc["status"], "feasible");
    assert_eq!(doc["certificate"]["certified"], true);
}

#[test]
fn mordell_shift_relaxation() {
    let dir = tempfile::tempdir().unwrap();
    let file = ProblemFile::from_problem(AnyPop::Complex(mordell_instance(3).unwrap()));
    let input = write_problem(dir.path(), "mordell.json", &file.to_json().unwrap());
    let out = run(&["--threads", "1", "solve", "--input", &input, "--r", "3", "--s", "0", "--no-extract"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = report(&out);
    assert!((doc["bound"].as_f64().unwrap() - 54.0).abs() < 1e-3);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("table.csv");
    let out = run(&[
        "bench",
        "--family",
        "binary-quadratic",
        "--sizes",
        "3",
        "--methods",
        "las:1,slas:1:1,las:2",
        "--trials",
        "2",
        "--oracle",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

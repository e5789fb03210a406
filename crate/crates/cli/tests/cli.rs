use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use causal_definetti::exchange::symmetry_residual;
use causal_definetti::io;
use causal_definetti::linalg;
use causal_definetti::suite::{build_bipartite_comb, build_ghz_mixture, build_idle_comb, discrimination_instruments, sym_comb_sequence};
use causal_definetti::tensor::{HermOp, SiteRef};
use serde_json::{json, Value};

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("cdft-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn cdft(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdft")).args(args).output().expect("run cdft")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn ket0() -> nalgebra::DMatrix<causal_definetti::Complex64> {
    linalg::basis_projector(2, 0)
}

#[test]
fn validate_reports_valid_invalid_and_bad_input() {
    let dir = scratch("validate");
    let good = dir.join("good.json");
    io::write_process(&good, &build_bipartite_comb(&ket0(), 2, ["A", "B"]).unwrap().op).unwrap();
    let out = cdft(&["validate", s(&good), "--json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json_of(&out)["verdict"], json!(true));

    let bad = dir.join("bad.json");
    let w = build_bipartite_comb(&ket0(), 2, ["A", "B"]).unwrap().op;
    io::write_process(&bad, &w.scale(0.5)).unwrap();
    assert_eq!(code(&cdft(&["validate", s(&bad)])), 1);

    let broken = dir.join("broken.json");
    fs::write(&broken, "{\"layout\": []").unwrap();
    let out = cdft(&["validate", s(&broken)]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    assert_eq!(code(&cdft(&["validate", s(&dir.join("missing.json"))])), 2);
}

#[test]
fn constraints_distinguish_causal_orders() {
    let dir = scratch("constraints");
    let w = dir.join("w.json");
    io::write_process(&w, &build_bipartite_comb(&ket0(), 2, ["A", "B"]).unwrap().op).unwrap();
    let forward = dir.join("forward.json");
    let backward = dir.join("backward.json");
    let order = |a: &str, b: &str| json!({"variant": "comb", "order": [{"site": a, "trial": 1}, {"site": b, "trial": 1}]});
    fs::write(&forward, order("A", "B").to_string()).unwrap();
    fs::write(&backward, order("B", "A").to_string()).unwrap();
    let out = cdft(&["constraints", s(&w), s(&forward), "--json"]);
    assert_eq!(code(&out), 0);
    assert!(json_of(&out)["max_residual"].as_f64().unwrap() <= 1e-12);
    let out = cdft(&["constraints", s(&w), s(&backward)]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
}

#[test]
fn symmetrize_writes_a_symmetric_process() {
    let dir = scratch("symmetrize");
    let input = dir.join("idle.json");
    let output = dir.join("sym.json");
    io::write_process(&input, &build_idle_comb(&ket0(), 2, 2).unwrap().op).unwrap();
    let out = cdft(&["symmetrize", s(&input), s(&output), "--n", "2", "--json"]);
    assert_eq!(code(&out), 0);
    assert!(json_of(&out)["input_symmetry_residual"].as_f64().unwrap() > 0.1);
    let (w, sites) = io::read_process(&output).unwrap();
    assert!(symmetry_residual(&w.op, 2).unwrap() <= 1e-12);
    assert_eq!(sites, vec![SiteRef::new("A", 1), SiteRef::new("A", 2)]);
}

#[test]
fn extendibility_modes_separate_the_symmetrised_comb() {
    let dir = scratch("extendibility");
    let seq = dir.join("seq.json");
    io::write_json(&seq, &sym_comb_sequence(&ket0(), 2, 2).unwrap()).unwrap();
    let out = cdft(&["extendibility", s(&seq), "--mode", "weak", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["residuals"].as_array().unwrap().len(), 1);
    assert_eq!(code(&cdft(&["extendibility", s(&seq), "--mode", "process"])), 1);
    assert_eq!(code(&cdft(&["extendibility", s(&seq), "--mode", "channel"])), 1);
    assert_eq!(code(&cdft(&["extendibility", s(&seq), "--mode", "sideways"])), 2);
}

#[test]
fn fit_reports_per_atom_diagnostics() {
    let dir = scratch("fit");
    let rho = dir.join("ghz.json");
    io::write_matrix(&rho, &build_ghz_mixture(2).unwrap()).unwrap();
    let out = cdft(&["fit", s(&rho), "--dict", "grid", "--count", "50", "--n", "2", "--json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = json_of(&out);
    assert!(report["fit_residual"].as_f64().unwrap() <= 1e-3);
    let atoms = report["atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 50);
    let mass: f64 = atoms.iter().filter(|a| a["supported"] == json!(true)).map(|a| a["weight"].as_f64().unwrap()).sum();
    assert!(mass > 0.99);

    // the same fit from an explicit atom file, with a support constraint both poles violate
    let atoms_file = dir.join("atoms.json");
    let poles: Vec<HermOp> = [0, 1]
        .iter()
        .map(|&k| HermOp::new(causal_definetti::suite::qubit_layout(), linalg::basis_projector(2, k)).unwrap())
        .collect();
    io::write_json(&atoms_file, &poles).unwrap();
    let spec = dir.join("spec.json");
    let r = HermOp::new(causal_definetti::suite::qubit_layout(), linalg::pauli_x()).unwrap();
    io::write_json(&spec, &json!({"variant": "product_expectation", "operators": [r], "values": [1.0]})).unwrap();
    let args = ["fit", s(&rho), "--dict", "file", "--atoms", s(&atoms_file), "--json"];
    assert_eq!(code(&cdft(&args)), 0);
    let out = cdft(&[&args[..], &["--spec", s(&spec)]].concat());
    assert_eq!(code(&out), 1);
    assert_eq!(json_of(&out)["support_verdict"], json!(false));
    assert_eq!(code(&cdft(&["fit", s(&rho), "--dict", "file"])), 2);
}

#[test]
fn discover_writes_csv_and_summary() {
    let dir = scratch("discover");
    for (name, order) in [("ab", ["A", "B"]), ("ba", ["B", "A"])] {
        io::write_process(dir.join(format!("{name}.json")), &build_bipartite_comb(&ket0(), 2, order).unwrap().op).unwrap();
    }
    let config = json!({
        "hypotheses": [{"name": "A<B", "file": "ab.json"}, {"name": "B<A", "file": "ba.json"}],
        "truth": "B<A",
        "instruments": discrimination_instruments(),
        "trials": 40,
        "seeds": 3,
    });
    let path = dir.join("config.json");
    fs::write(&path, config.to_string()).unwrap();
    let out_dir = dir.join("out");
    let out = cdft(&["discover", s(&path), "--out", s(&out_dir), "--json", "--seed", "10"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json_of(&out);
    assert_eq!(summary["map_hypothesis"], json!("B<A"));
    assert_eq!(summary["seeds"], json!([10, 11, 12]));
    let csv = fs::read_to_string(out_dir.join("posterior.csv")).unwrap();
    assert!(csv.starts_with("seed,trial,A<B,B<A,entropy\n"));
    assert_eq!(csv.lines().count(), 1 + 3 * 41);
    assert!(out_dir.join("summary.json").exists());
}

#[test]
fn suite_exit_codes() {
    let out = cdft(&["suite", "--case", "ghz_mixture", "--json"]);
    assert_eq!(code(&out), 0);
    let report = json_of(&out);
    assert_eq!(report["cases"].as_array().unwrap().len(), 1);
    assert_eq!(code(&cdft(&["suite", "--case", "ghz_mixture", "--tol", "0"])), 1);
    assert_eq!(code(&cdft(&["suite", "--case", "no_such_case"])), 2);
}

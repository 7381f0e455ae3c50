mod common;

use std::fs;

use common::{code, ewvqe, stderr, stdout, table_value};
use serde_json::Value;

#[test]
fn ground_two_sites() {
    let dir = tempfile::tempdir().unwrap();
    let o = ewvqe(&["ground", "--n", "2"], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let out = stdout(&o);
    assert!((table_value(&out, "E_0") + 3.0).abs() < 1e-6);
    assert!((table_value(&out, "E_sep") + 1.0).abs() < 1e-6);
    assert!((table_value(&out, "G") - 2.0).abs() < 1e-6);
}

#[test]
fn ground_six_sites() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&ewvqe(&["ground", "--n", "6"], dir.path()));
    let e0 = table_value(&out, "E_0");
    // exact value; quoted to one decimal as -9.9
    assert!((e0 + 9.974309).abs() < 1e-5, "{e0}");
    assert!((table_value(&out, "E_sep") + 5.0).abs() < 1e-6);
    assert!((table_value(&out, "G") - (e0.abs() - 5.0)).abs() < 1e-5);
}

#[test]
fn ground_rejects_single_site() {
    let dir = tempfile::tempdir().unwrap();
    let o = ewvqe(&["ground", "--n", "1"], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("error"));
}

#[test]
fn ground_reads_hamiltonian_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.json");
    fs::write(
        &path,
        r#"{"n_qubits": 2, "J": -1.0, "h": 0.0, "terms": [
            {"coeff": 1.0, "paulis": [[0, "X"], [1, "X"]]},
            {"coeff": 1.0, "paulis": [[0, "Y"], [1, "Y"]]},
            {"coeff": 1.0, "paulis": [[0, "Z"], [1, "Z"]]}]}"#,
    )
    .unwrap();
    let o = ewvqe(&["ground", "--hamiltonian", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!((table_value(&stdout(&o), "E_0") + 3.0).abs() < 1e-6);

    fs::write(&path, r#"{"n_qubits": 2, "J": -1.0, "h": 0.0, "terms": [{"coeff": 1.0, "paulis": [[0, "Q"]]}]}"#).unwrap();
    let o = ewvqe(&["ground", "--hamiltonian", path.to_str().unwrap()], dir.path());
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("terms[0]"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&ewvqe(&["vqe", "--family", "qaoa", "--n", "4"], dir.path())), 2);
    assert_eq!(code(&ewvqe(&["frobnicate"], dir.path())), 2);
    assert_eq!(code(&ewvqe(&["ground"], dir.path())), 2);
    let help = ewvqe(&["--help"], dir.path());
    assert_eq!(code(&help), 0);
    for cmd in ["ground", "vqe", "sweep", "plot"] {
        assert!(stdout(&help).contains(cmd));
    }
}

fn summary(dir: &std::path::Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn hva_near_reference_detects_immediately() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let o = ewvqe(
        &[
            "vqe", "--family", "hva", "--n", "4", "--shots", "0", "--restarts", "5", "--iterations", "10",
            "--init-high", "1e-6", "--out", out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let s = summary(&out);
    for run in s["runs"].as_array().unwrap() {
        assert_eq!(run["detection_iteration"], 0);
    }
    assert_eq!(s["detection_rate"], 1.0);
    let lines = fs::read_to_string(out.join("trace.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 5 * 11);
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(first["restart"], 0);
    assert_eq!(first["iteration"], 0);
    let d: Value = serde_json::from_str(&fs::read_to_string(out.join("descriptor.json")).unwrap()).unwrap();
    assert_eq!(d["n_params"], 3);
}

#[test]
fn separable_ansatz_never_detects_analytically() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("hesa");
    let o = ewvqe(
        &[
            "vqe", "--family", "hesa", "--n", "3", "--restarts", "4", "--iterations", "30", "--stage1-restarts", "0",
            "--out", out.to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(summary(&out)["detection_rate"], 0.0);
}

#[test]
fn vqe_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for (k, jobs) in ["1", "0"].into_iter().enumerate() {
        let out = dir.path().join(format!("r{k}"));
        let o = ewvqe(
            &[
                "--jobs", jobs, "vqe", "--family", "hea-b", "--n", "3", "--shots", "20", "--restarts", "3",
                "--iterations", "15", "--seed", "9", "--out", out.to_str().unwrap(),
            ],
            dir.path(),
        );
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        files.push((
            fs::read(out.join("trace.jsonl")).unwrap(),
            fs::read(out.join("summary.json")).unwrap(),
        ));
    }
    assert!(files[0] == files[1]);
}

#[test]
fn vqe_uses_output_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = std::process::Command::new(env!("CARGO_BIN_EXE_ewvqe"))
        .args(["vqe", "--family", "hea_a", "--n", "2", "--iterations", "2", "--stage1-restarts", "0"])
        .current_dir(dir.path())
        .env("EWVQE_OUT_DIR", dir.path().join("envout"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(dir.path().join("envout/vqe/hea_a-n2-s0/summary.json").exists());
}

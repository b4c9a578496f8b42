//! End-to-end tests of the twistlab binary: document round trips, exit
//! codes, and certificate determinism.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_twistlab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).to_string()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).to_string()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// A Z/4 group groupoid graded mod 2, written by hand.
const Z4_MOD2: &str = r#"{
  "units": ["*"],
  "arrows": [
    {"id": "g0", "src": "*", "rng": "*", "degree": "0"},
    {"id": "g1", "src": "*", "rng": "*", "degree": "1"},
    {"id": "g2", "src": "*", "rng": "*", "degree": "0"},
    {"id": "g3", "src": "*", "rng": "*", "degree": "1"}
  ],
  "gamma": "Z2",
  "compositions": [
    {"left": "g0", "right": "g0", "result": "g0"},
    {"left": "g0", "right": "g1", "result": "g1"},
    {"left": "g0", "right": "g2", "result": "g2"},
    {"left": "g0", "right": "g3", "result": "g3"},
    {"left": "g1", "right": "g0", "result": "g1"},
    {"left": "g1", "right": "g1", "result": "g2"},
    {"left": "g1", "right": "g2", "result": "g3"},
    {"left": "g1", "right": "g3", "result": "g0"},
    {"left": "g2", "right": "g0", "result": "g2"},
    {"left": "g2", "right": "g1", "result": "g3"},
    {"left": "g2", "right": "g2", "result": "g0"},
    {"left": "g2", "right": "g3", "result": "g1"},
    {"left": "g3", "right": "g0", "result": "g3"},
    {"left": "g3", "right": "g1", "result": "g0"},
    {"left": "g3", "right": "g2", "result": "g1"},
    {"left": "g3", "right": "g3", "result": "g2"}
  ]
}"#;

/// Z/2 with the trivial grading: valid but not effective.
const Z2_TRIVIAL_GRADING: &str = r#"{
  "units": ["*"],
  "arrows": [
    {"id": "e", "src": "*", "rng": "*"},
    {"id": "g", "src": "*", "rng": "*"}
  ],
  "gamma": "trivial",
  "compositions": [
    {"left": "e", "right": "e", "result": "e"},
    {"left": "e", "right": "g", "result": "g"},
    {"left": "g", "right": "e", "result": "g"},
    {"left": "g", "right": "g", "result": "e"}
  ]
}"#;

#[test]
fn generated_pair_groupoid_validates() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["generate", "pair", "--n", "3", "--out", "pair3.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let out = run(&["validate", "pair3.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("valid: 3 units, 9 arrows"));
}

#[test]
fn broken_cocycle_fails_validation_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "generate", "twisted", "--n1", "2", "--n2", "2", "--out", "tw.json",
        ],
        dir.path(),
    );
    let path = dir.path().join("tw.json");
    // Flip one non-unit cocycle value in place.
    let text = std::fs::read_to_string(&path).unwrap();
    let mut doc: serde_json::Value = serde_json::from_str(&text).unwrap();
    let comps = doc["compositions"].as_array_mut().unwrap();
    let entry = comps
        .iter_mut()
        .find(|c| c["left"] == "1,1" && c["right"] == "1,1")
        .unwrap();
    let old = entry["sigma_re"].as_f64().unwrap();
    entry["sigma_re"] = serde_json::json!(-old);
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();

    let out = run(&["validate", "tw.json"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("cocycle violation"));
    assert!(stdout(&out).contains("cocycle identity fails"));
}

#[test]
fn malformed_document_reports_parse_location() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bad.json"), "{ \"units\": [\n  broken\n]}").unwrap();
    let out = run(&["validate", "bad.json"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("line"), "{}", stderr(&out));
}

#[test]
fn algebra_norm_of_all_ones_on_pair_three() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["generate", "pair", "--n", "3", "--out", "pair3.json"],
        dir.path(),
    );
    let out = run(&["algebra", "pair3.json", "--norm", "all-ones"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("reduced norm of all-ones = 3.000000000000"));
}

#[test]
fn algebra_rejects_unknown_arrow_in_element_spec() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["generate", "pair", "--n", "2", "--out", "p.json"],
        dir.path(),
    );
    let out = run(&["algebra", "p.json", "--norm", "nope"], dir.path());
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("unknown arrow id"));
}

#[test]
fn algebra_components_on_mod_two_grading() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("z4.json"), Z4_MOD2).unwrap();
    let out = run(&["algebra", "z4.json", "--component", "all"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("component 0: g0, g2"));
    assert!(text.contains("component 1: g1, g3"));
}

#[test]
fn cartan_flag_reports_precondition_failure_with_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("z2t.json"), Z2_TRIVIAL_GRADING).unwrap();
    let out = run(&["algebra", "z2t.json", "--cartan"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stdout(&out).contains("precondition failure"));
}

#[test]
fn reconstruct_group_z3_writes_matching_upsilon_table() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["generate", "group", "--group", "Z3", "--out", "z3.json"],
        dir.path(),
    );
    let out = run(
        &["reconstruct", "z3.json", "--certificate", "cert.json"],
        dir.path(),
    );
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("reconstruction certified: 3 germs, cocycle class trivial"));
    for g in ["0", "1", "2"] {
        assert!(text.contains(&format!("Y_G: {g} -> {g}")));
    }
    let cert: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("cert.json")).unwrap())
            .unwrap();
    assert_eq!(cert["reconstruction"]["germ_count"], 3);
    assert_eq!(cert["reconstruction"]["cocycle_trivial_class"], true);
}

#[test]
fn reconstruct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    // Precondition failure: trivial grading on a group.
    std::fs::write(dir.path().join("z2t.json"), Z2_TRIVIAL_GRADING).unwrap();
    let out = run(&["reconstruct", "z2t.json"], dir.path());
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("zero fiber is not principal"));

    // Validation failure: corrupted cocycle.
    run(
        &[
            "generate", "twisted", "--n1", "2", "--n2", "2", "--out", "tw.json",
        ],
        dir.path(),
    );
    let path = dir.path().join("tw.json");
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    doc["compositions"][7]["sigma_im"] = serde_json::json!(0.5);
    std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap()).unwrap();
    let out = run(&["reconstruct", "tw.json"], dir.path());
    assert_eq!(code(&out), 1);
}

#[test]
fn twisted_reconstruction_reports_nontrivial_class() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "generate", "twisted", "--n1", "2", "--n2", "2", "--out", "tw.json",
        ],
        dir.path(),
    );
    let out = run(&["reconstruct", "tw.json"], dir.path());
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("cocycle class nontrivial"));
}

#[test]
fn certificates_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "generate", "action", "--preset", "z3-cycle", "--out", "act.json",
        ],
        dir.path(),
    );
    for name in ["c1.json", "c2.json"] {
        let out = run(
            &["reconstruct", "act.json", "--certificate", name],
            dir.path(),
        );
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let c1 = std::fs::read(dir.path().join("c1.json")).unwrap();
    let c2 = std::fs::read(dir.path().join("c2.json")).unwrap();
    assert_eq!(c1, c2);
}

#[test]
fn generated_documents_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a.json", "b.json"] {
        run(
            &[
                "generate",
                "twisted",
                "--n1",
                "3",
                "--n2",
                "3",
                "--out",
                name,
                "--perturb-seed",
                "11",
            ],
            dir.path(),
        );
    }
    let a = std::fs::read(dir.path().join("a.json")).unwrap();
    let b = std::fs::read(dir.path().join("b.json")).unwrap();
    assert_eq!(a, b);
}

#[test]
fn tol_env_var_is_honored() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &["generate", "pair", "--n", "2", "--out", "p.json"],
        dir.path(),
    );

    let out = bin()
        .args(["reconstruct", "p.json"])
        .current_dir(dir.path())
        .env("TWISTLAB_TOL", "1e-6")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("within 1.0e-6"));

    let out = bin()
        .args(["reconstruct", "p.json"])
        .current_dir(dir.path())
        .env("TWISTLAB_TOL", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("TWISTLAB_TOL"));
}

#[test]
fn perturbed_documents_still_reconstruct() {
    let dir = tempfile::tempdir().unwrap();
    run(
        &[
            "generate",
            "twisted",
            "--n1",
            "2",
            "--n2",
            "2",
            "--out",
            "tw.json",
            "--perturb-seed",
            "5",
        ],
        dir.path(),
    );
    let out = run(&["validate", "tw.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let out = run(&["reconstruct", "tw.json"], dir.path());
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("cocycle class nontrivial"));
}

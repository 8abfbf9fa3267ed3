//! End-to-end tests of the `jointree` binary: exit codes, determinism and
//! JSON round-trips.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jointree"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn classify_comp_is_flat_json() {
    let out = run(&["classify", fixture("comp.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["alpha"], true);
    assert_eq!(v["linear"], false);
    assert_eq!(v["berge"], false);
    assert_eq!(v["gamma"], false);
}

#[test]
fn classify_path_all_true() {
    let out = run(&["classify", fixture("path.txt").to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    for key in ["alpha", "linear", "berge", "gamma"] {
        assert_eq!(v[key], true, "{key}");
    }
}

#[test]
fn classify_disconnected_labels_components() {
    let out = run(&["classify", fixture("split.json").to_str().unwrap()]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let comps = v.as_array().expect("array per component");
    assert_eq!(comps.len(), 2);
    assert_eq!(comps[0]["classification"]["alpha"], true);
}

#[test]
fn malformed_file_exits_2() {
    let out = run(&["classify", fixture("bad.txt").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(err.contains("line 2"), "diagnostic names the line: {err}");
}

#[test]
fn unknown_root_exits_2() {
    let out = run(&["mcs", fixture("path.txt").to_str().unwrap(), "--root", "R9"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn canonical_on_non_berge_exits_1() {
    let out = run(&["canonical", fixture("comp.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Berge"));
}

#[test]
fn convert_plan_orphan_exits_1_with_key() {
    let out = run(&[
        "convert-plan",
        fixture("gam.json").to_str().unwrap(),
        "--plan",
        "R1,R2,R3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr).to_string();
    assert!(
        err.contains("R3") && err.contains("a,b,c"),
        "diagnostic: {err}"
    );
}

#[test]
fn convert_plan_success_round_trips() {
    let out = run(&[
        "convert-plan",
        fixture("gam.json").to_str().unwrap(),
        "--plan",
        "R3,R1,R2",
    ]);
    assert!(out.status.success());
    let (h, _) = jointree::hypergraph::hypergraph_from_file(fixture("gam.json")).unwrap();
    let tree = jointree::render::tree_from_json(&h, &stdout(&out)).unwrap();
    assert!(jointree::mcs::validate_join_tree(&h, &tree));
}

#[test]
fn mcs_json_round_trips_and_validates() {
    for file in ["comp.json", "clique5.json", "gam.json"] {
        let out = run(&["mcs", fixture(file).to_str().unwrap()]);
        assert!(out.status.success(), "{file}");
        let (h, _) = jointree::hypergraph::hypergraph_from_file(fixture(file)).unwrap();
        let tree = jointree::render::tree_from_json(&h, &stdout(&out)).unwrap();
        assert!(jointree::mcs::validate_join_tree(&h, &tree), "{file}");
    }
}

#[test]
fn enumerate_edits_format_and_limit() {
    let out = run(&[
        "enumerate",
        fixture("clique5.json").to_str().unwrap(),
        "--limit",
        "10",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(first.starts_with("TREE "), "first line: {first}");
    let swaps = lines.clone().filter(|l| l.starts_with("SWAP ")).count();
    assert_eq!(swaps, 9, "limit 10 = initial tree + 9 swaps");
    assert!(text.contains("limit 10 reached"));
}

#[test]
fn enumerate_trees_format_counts_cayley() {
    let out = run(&[
        "enumerate",
        fixture("clique5.json").to_str().unwrap(),
        "--format",
        "trees",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 125, "5^3 join trees");
}

#[test]
fn enumerate_is_deterministic() {
    let path = fixture("clique5.json");
    let args = ["enumerate", path.to_str().unwrap(), "--format", "edits"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b), "byte-identical reruns");
}

#[test]
fn enumerate_dot_renders_equivalent_graph() {
    let out = run(&[
        "enumerate",
        fixture("comp.json").to_str().unwrap(),
        "--format",
        "dot",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.starts_with("graph equivalent {"));
    // The non-MST edge (A,C) is deleted and must not be drawn.
    assert_eq!(text.matches(" -- ").count(), 2);
}

#[test]
fn corpus_counts_fixture_directory() {
    let dir = fixture("");
    let out = run(&["corpus", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let data = text.lines().nth(1).unwrap();
    let cols: Vec<&str> = data.split_whitespace().collect();
    // 5 parseable queries (bad.txt errors): split counts as alpha+berge+gamma,
    // comp/gam are composite-key or gamma-cyclic.
    assert_eq!(cols, vec!["5", "5", "2", "3", "3", "1"]);
}

#[test]
fn corpus_empty_directory_reports_zero_row() {
    let dir = std::env::temp_dir().join(format!("jointree-empty-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = run(&["corpus", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    let cols: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(cols, vec!["0", "0", "0", "0", "0", "0"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_passes_on_fixture_and_seed_range() {
    let out = run(&["verify", fixture("gam.json").to_str().unwrap()]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));

    let out = run(&["verify", "--seed-range", "0..3", "--class", "berge"]);
    assert!(out.status.success());
    assert!(!stdout(&out).contains("FAIL"));
}

#[test]
fn version_flag_works() {
    let out = run(&["--version"]);
    assert!(out.status.success());
    assert!(stdout(&out).starts_with("jointree "));
}

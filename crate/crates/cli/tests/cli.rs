use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn codicil(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_codicil"))
        .args(args)
        .output()
        .expect("spawn codicil")
}

fn ok(args: &[&str]) -> String {
    let out = codicil(args);
    assert!(
        out.status.success(),
        "codicil {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

fn planted(dir: &Path) {
    ok(&["generate", "--seed", "4", "--out-dir", &s(dir)]);
}

#[test]
fn alpha_outside_unit_interval_is_a_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    planted(tmp.path());
    let out_dir = tmp.path().join("run");
    let out = codicil(&[
        "pipeline",
        "--graph",
        &s(&tmp.path().join("graph.txt")),
        "--alpha",
        "1.2",
        "--out-dir",
        &s(&out_dir),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha"));
    assert!(!out_dir.exists());
}

#[test]
fn missing_input_fails_before_writing() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("run");
    let out = codicil(&[
        "pipeline",
        "--graph",
        &s(&tmp.path().join("nope.txt")),
        "--out-dir",
        &s(&out_dir),
    ]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("pipeline"));
    assert!(!out_dir.exists());
}

#[test]
fn pipeline_writes_manifest_and_evaluation() {
    let tmp = tempfile::tempdir().unwrap();
    planted(tmp.path());
    let out_dir = tmp.path().join("run");
    let stdout = ok(&[
        "pipeline",
        "--graph",
        &s(&tmp.path().join("graph.txt")),
        "--terms",
        &s(&tmp.path().join("terms.txt")),
        "--truth",
        &s(&tmp.path().join("truth.txt")),
        "--k",
        "10",
        "--inflation",
        "1.4",
        "--out-dir",
        &s(&out_dir),
    ]);
    assert!(stdout.contains("fscore: 1.000000"), "{stdout}");
    let manifest = fs::read_to_string(out_dir.join("manifest.json")).unwrap();
    let json: serde_json::Value = serde_json::from_str(&manifest).unwrap();
    assert_eq!(json["realized_clusters"], 2);
    assert_eq!(json["sampler"]["k"], 10);
    assert!(
        json["counts"]["sampled"].as_u64().unwrap() <= json["counts"]["union"].as_u64().unwrap()
    );
    assert!(out_dir.join("eval.txt").exists());
}

#[test]
fn evaluate_restricts_to_truth_universe() {
    let tmp = tempfile::tempdir().unwrap();
    let pred = tmp.path().join("pred.txt");
    let truth = tmp.path().join("truth.txt");
    fs::write(&pred, "0 0\n1 0\n2 1\n3 1\n").unwrap();
    // Vertex 3 is unlabeled.
    fs::write(&truth, "0 1\n2\n").unwrap();
    let full = ok(&["evaluate", "--pred", &s(&pred), "--truth", &s(&truth)]);
    let restricted = ok(&[
        "evaluate",
        "--pred",
        &s(&pred),
        "--truth",
        &s(&truth),
        "--truth-universe",
    ]);
    assert!(full.contains("universe_size: 4"), "{full}");
    assert!(restricted.contains("universe_size: 3"), "{restricted}");
    assert!(restricted.contains("fscore: 1.000000"), "{restricted}");
}

#[test]
fn diagnose_reports_components_and_spectrum() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g.txt");
    fs::write(&g, "# vertices: 5\n0 1\n1 2\n3 4\n").unwrap();
    let out = ok(&["diagnose", "--graph", &s(&g), "--spectrum", "3"]);
    assert!(out.contains("components: 2"), "{out}");
    assert!(out.contains("zero_eigenvalues: 2"), "{out}");
}

#[test]
fn partitioner_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let g = tmp.path().join("g.txt");
    fs::write(&g, "0 1\n1 2\n2 0\n").unwrap();
    let exported = tmp.path().join("g.graph");
    ok(&[
        "export-partitioner",
        "--graph",
        &s(&g),
        "--out",
        &s(&exported),
    ]);
    assert_eq!(
        fs::read_to_string(&exported).unwrap(),
        "3 3\n2 3\n1 3\n1 2\n"
    );

    let part = tmp.path().join("g.graph.part.2");
    fs::write(&part, "1\n0\n1\n").unwrap();
    let clusters = tmp.path().join("c.txt");
    ok(&[
        "import-partition",
        "--part",
        &s(&part),
        "--vertices",
        "3",
        "--out",
        &s(&clusters),
    ]);
    assert_eq!(fs::read_to_string(&clusters).unwrap(), "0 0\n1 1\n2 0\n");

    let short = codicil(&[
        "import-partition",
        "--part",
        &s(&part),
        "--vertices",
        "4",
        "--out",
        &s(&clusters),
    ]);
    assert!(!short.status.success());
}

#[test]
fn import_linqs_converts_files() {
    let tmp = tempfile::tempdir().unwrap();
    let content = tmp.path().join("x.content");
    let cites = tmp.path().join("x.cites");
    fs::write(&content, "a 1 0 1 ML\nb 0 1 1 DB\nc 1 1 0 ML\n").unwrap();
    fs::write(&cites, "a b\nc a\nz a\n").unwrap();
    let out_dir = tmp.path().join("out");
    let stdout = ok(&[
        "import-linqs",
        "--content",
        &s(&content),
        "--cites",
        &s(&cites),
        "--out-dir",
        &s(&out_dir),
    ]);
    assert!(stdout.contains("dropped_citations: 1"), "{stdout}");
    for f in ["graph.txt", "terms.txt", "truth.txt"] {
        assert!(out_dir.join(f).exists());
    }
}

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ontomatch")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn validate_summarizes() {
    let o = run(&["validate", &fixture("laptops.onto.json")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("datatype properties: 5"));
    assert!(out.contains("object properties:   1"));
    assert!(out.contains("fingerprint:         sha256:"));
}

#[test]
fn golden_flat_match() {
    let o =
        run(&["match", "--ontology", &fixture("laptops.onto.json"), "--demand", &fixture("white_laptop.demand.json")]);
    assert_eq!(o.status.code(), Some(0));
    let ids: Vec<String> = stdout(&o).lines().map(|l| l.split_whitespace().next().unwrap_or("").to_owned()).collect();
    assert_eq!(ids, ["Laptop#1", "Laptop#2", "Laptop#3", "Laptop#4", "4"]);
    assert!(stdout(&o).ends_with("4 results\n"));
}

#[test]
fn grouped_match_json() {
    let o = run(&[
        "--json",
        "match",
        "--ontology",
        &fixture("laptops.onto.json"),
        "--demand",
        &fixture("white_laptop.demand.json"),
        "--strategy",
        "grouping",
        "--group-order",
        "desc",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["groups"].as_array().unwrap().len(), 2);
    assert_eq!(v["groups"][0]["signature"].as_array().unwrap().len(), 4);
}

#[test]
fn empty_supply_prints_zero_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("laptops.onto.json")).unwrap()).unwrap();
    doc["instances"] = serde_json::json!([]);
    let path = dir.path().join("empty.onto.json");
    std::fs::write(&path, doc.to_string()).unwrap();
    let o = run(&["match", "--ontology", path.to_str().unwrap(), "--demand", &fixture("white_laptop.demand.json")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "0 results\n");
}

#[test]
fn undeclared_property_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.demand.json");
    std::fs::write(
        &path,
        r#"{"concept":"Laptop","ontology_uri":"u","constraints":[{"property":"weight","op":"lt","value":2}]}"#,
    )
    .unwrap();
    let o = run(&["match", "--ontology", &fixture("laptops.onto.json"), "--demand", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("weight"));
}

#[test]
fn fanout_without_providers_exits_2() {
    let o = run(&["fanout", "--demand", &fixture("white_laptop.demand.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("no providers"));
}

#[test]
fn bench_needs_two_repetitions() {
    let o = run(&["bench", "--instances", "10", "--repetitions", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let o = run(&[
        "bench",
        "--profile",
        "books",
        "--instances",
        "50",
        "--queries",
        "1,2",
        "--repetitions",
        "2",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "query,properties,peers,resources,matchmaking_ms,latency_ms,total_ms");
    assert_eq!(lines.count(), 2);
}

use std::path::Path;
use std::process::{Command, Output};

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dunkl-lab")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn malformed_config_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.json", "{ not json");
    let out = lab(&["validate-geometry", "--config", &cfg, "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn wrong_schema_and_unknown_fields_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cfg = write(dir.path(), "v2.json", r#"{"schema_version": 2}"#);
    assert_eq!(lab(&["bmo", "--config", &cfg, "--out", out_dir]).status.code(), Some(3));
    let cfg = write(dir.path(), "extra.json", r#"{"schema_version": 1, "sed": 3}"#);
    assert_eq!(lab(&["bmo", "--config", &cfg, "--out", out_dir]).status.code(), Some(3));
    let missing = dir.path().join("missing.json");
    assert_eq!(lab(&["bmo", "--config", missing.to_str().unwrap(), "--out", out_dir]).status.code(), Some(3));
}

#[test]
fn unknown_names_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().to_str().unwrap();
    let cfg = write(dir.path(), "k.json", r#"{"schema_version": 1, "kernel": {"kernel": "gauss"}}"#);
    assert_eq!(lab(&["verify-kernel", "--config", &cfg, "--out", out_dir]).status.code(), Some(4));
    let cfg = write(dir.path(), "b.json", r#"{"schema_version": 1, "commutator": {"b_family": "smooth"}}"#);
    assert_eq!(lab(&["commutator-norm", "--config", &cfg, "--out", out_dir]).status.code(), Some(4));
}

#[test]
fn unknown_subcommand_is_a_usage_error() {
    assert_eq!(lab(&["everything", "--config", "x.json"]).status.code(), Some(2));
}

#[test]
fn geometry_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "g.json", r#"{"schema_version": 1, "geometry": {"pairs": 50}}"#);
    let out = dir.path().join("out");
    let status = lab(&["validate-geometry", "--config", &cfg, "--out", out.to_str().unwrap()]).status;
    assert_eq!(status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
    assert_eq!(summary["config"]["geometry"]["pairs"], 50);
    assert!(out.join("geometry.csv").exists());
}

#[test]
fn constant_symbols_give_degenerate_cells() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.json",
        r#"{"schema_version": 1,
            "commutator": {"b_family": "constant", "multiplicities": [1.0], "pairs": 2, "p": [2.0]}}"#,
    );
    let out = dir.path().join("out");
    let res = lab(&["commutator-norm", "--config", &cfg, "--out", out.to_str().unwrap()]);
    let text = std::fs::read_to_string(out.join("commutator_norm.csv")).unwrap();
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let headers = rows.headers().unwrap().clone();
    let status = headers.iter().position(|h| h == "status").unwrap();
    let mut n = 0;
    for row in rows.records() {
        assert_eq!(&row.unwrap()[status], "degenerate");
        n += 1;
    }
    assert_eq!(n, 8);
    // no nonconstant symbol: the family-growth gate is vacuous and the sharp diagnostic is skipped
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stdout));
}

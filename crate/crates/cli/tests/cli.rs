use std::io::Write;
use std::process::{Command, Output};

fn kstab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kstab")).args(args).output().expect("run kstab")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

const A2: &str = r#"
name = "A2 cone"
variables = ["u", "v", "z", "w"]
weights = [[1, -1, 0, 0], [0, 6, 2, 3]]
monomials = [[1, 1, 0, 0], [0, 0, 3, 0], [0, 0, 0, 2]]
degenerations = [[0, 0, 1, 0], [0, 0, 0, 1]]
assume_normal = true
"#;

fn document(text: &str, suffix: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::Builder::new().suffix(suffix).tempfile().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn analyze_family_json() {
    let o = kstab(&["analyze", "--family", "bp", "-p", "3", "-q", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["volume"], "125/486");
    assert_eq!(v["volume_decimal"], "0.257201646090");
    assert_eq!(v["verdict"]["verdict"], "stable");
    assert_eq!(v["futaki"].as_array().unwrap().len(), 2);
}

#[test]
fn analyze_unstable_text() {
    let o = kstab(&["analyze", "--family", "yy2", "-p", "6", "-q", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("unstable (witness [0, 0, 3, -1])"));
}

#[test]
fn analyze_document_matches_family() {
    let doc = document(A2, ".toml");
    let o = kstab(&["analyze", doc.path().to_str().unwrap(), "--format", "csv"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("variety,w,fut,sign,product,volume,verdict"));
    assert!(out.contains("125/5832"));
    assert_eq!(out.lines().count(), 3);
}

#[test]
fn precondition_errors_exit_2() {
    let o = kstab(&["analyze", "--family", "bp", "-p", "2", "-q", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let bad = document("name = \"x\"\nweights = [[1, 1]]\nmonomials = [[1, 0], [0, 3]]\n", ".toml");
    let o = kstab(&["analyze", bad.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = kstab(&["analyze", "/nonexistent/variety.toml"]);
    assert_eq!(o.status.code(), Some(2));
    let o = kstab(&["sweep", "--family", "bp", "-p", "5..2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn sweep_csv_is_sorted_and_complete() {
    let o = kstab(&["sweep", "--family", "yy3", "-p", "2..4", "-q", "2..4", "--format", "csv"]);
    assert!(o.status.success());
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 10);
    let keys: Vec<(i64, i64)> = lines[1..]
        .iter()
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    let seq = kstab(&["sweep", "--family", "yy3", "-p", "2..4", "-q", "2..4", "--format", "csv", "--sequential"]);
    assert_eq!(stdout(&seq), out);
}

#[test]
fn sweep_records_invalid_instances() {
    let o = kstab(&["sweep", "--family", "bp", "-p", "2", "-q", "2..3", "--format", "json"]);
    assert!(o.status.success());
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(rows[0]["error"].is_string());
    assert_eq!(rows[1]["stable"], true);
}

#[test]
fn pdivisor_json() {
    let o = kstab(&["pdivisor", "--family", "bp", "-p", "3", "-q", "2", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["tail_cone"]["rays"], serde_json::json!([[1, 0], [1, 6]]));
    assert_eq!(v["slopes"]["count_nontrivial_bound"], 2);
}

#[test]
fn oracle_family_and_document() {
    let o = kstab(&["oracle", "--family", "bp", "-p", "5", "-q", "3"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("agree"));
    let doc = document(A2, ".toml");
    let path = doc.path().to_str().unwrap();
    let o = kstab(&["oracle", path, "--reeb", "3,1", "--cutoff", "30", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mismatches"], serde_json::json!([]));
    let o = kstab(&["oracle", path]);
    assert_eq!(o.status.code(), Some(2));
    let o = kstab(&["oracle", path, "--reeb", "1/2,1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn json_documents_are_accepted() {
    let doc = document(
        r#"{"name": "E8", "weights": [[15, 10, 6]], "monomials": [[2, 0, 0], [0, 3, 0], [0, 0, 5]]}"#,
        ".json",
    );
    let o = kstab(&["analyze", doc.path().to_str().unwrap(), "--format", "json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["verdict"], "stable");
}

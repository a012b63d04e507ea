use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn cliffseed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cliffseed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, contents).unwrap();
    p
}

fn ham(dir: &Path, name: &str, n: usize, terms: &[(&str, f64)]) -> String {
    let terms: Vec<String> = terms
        .iter()
        .map(|(l, c)| format!(r#"{{"pauli":"{l}","coeff":{c}}}"#))
        .collect();
    let doc = format!(r#"{{"name":"{name}","num_qubits":{n},"terms":[{}]}}"#, terms.join(","));
    write(dir, &format!("{name}.json"), &doc).display().to_string()
}

/// Data rows of a CSV with `#` header lines, keyed by the column names.
fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap().split(',').map(String::from).collect();
    lines
        .map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect())
        .collect()
}

fn field<'a>(row: &'a [(String, String)], key: &str) -> &'a str {
    &row.iter().find(|(k, _)| k == key).unwrap_or_else(|| panic!("no column {key}")).1
}

fn summary_value(line: &str, key: &str) -> String {
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .to_string()
}

#[test]
fn exhaustive_search_finds_xx_ground() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "xx2", 2, &[("XX", 1.0)]);
    let out = dir.path().join("run");
    let o = cliffseed(&["search", "--ham", &h, "--reps", "1", "--strategy", "exhaustive", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let line = stdout(&o);
    assert_eq!(summary_value(&line, "best_energy").parse::<f64>().unwrap(), -1.0);
    assert_eq!(summary_value(&line, "iterations"), "65536");
    assert!(line.contains("wall_ms="));

    let csv = fs::read_to_string(out.join("trace.csv")).unwrap();
    assert!(csv.starts_with("# manifest: {"));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("trace.json")).unwrap()).unwrap();
    assert_eq!(json["manifest"]["strategy"], "exhaustive");
    assert_eq!(json["manifest"]["num_qubits"], 2);

    // The written best assignment feeds straight back into `terms`.
    let best = out.join("best_assignment.json");
    let o = cliffseed(&["terms", "--ham", &h, "--assignment", best.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&stdout(&o));
    assert_eq!(field(&rows[0], "expectation_cafqa"), "-1");
}

#[test]
fn same_seed_gives_byte_identical_traces() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "mix", 3, &[("XXI", 0.7), ("IZZ", -0.4), ("YIY", 0.3), ("ZII", 0.2)]);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = cliffseed(&["--threads", "1", "search", "--ham", &h, "--budget", "50", "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{o:?}");
        (fs::read(out.join("trace.csv")).unwrap(), fs::read(out.join("trace.json")).unwrap())
    };
    let (a, b) = (run("a"), run("b"));
    assert_eq!(a, b);
    let other = dir.path().join("c");
    cliffseed(&["--threads", "1", "search", "--ham", &h, "--budget", "50", "--seed", "8", "--out", other.to_str().unwrap()]);
    assert_ne!(fs::read(other.join("trace.csv")).unwrap(), a.0);
}

#[test]
fn eighth_turn_search_reports_its_alphabet() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "xx2", 2, &[("XX", 1.0), ("ZI", 0.3)]);
    let o = cliffseed(&["search", "--ham", &h, "--k", "1", "--budget", "40", "--seed", "2"]);
    assert!(o.status.success(), "{o:?}");
    let line = stdout(&o);
    assert_eq!(summary_value(&line, "alphabet"), "eighth_turn(k=1)");
    assert_eq!(summary_value(&line, "iterations"), "40");
}

#[test]
fn exhaustive_over_cap_is_a_runtime_error() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "big", 6, &[("ZZZZZZ", 1.0)]);
    let o = cliffseed(&["search", "--ham", &h, "--strategy", "exhaustive"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert!(o.stdout.is_empty());
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", r#"{"num_qubits":2,"terms":[{"pauli":"XQ","coeff":1.0}]}"#);
    let wrong_field = write(dir.path(), "extra.json", r#"{"num_qubits":2,"terms":[],"oops":1}"#);
    let good = ham(dir.path(), "xx2", 2, &[("XX", 1.0)]);
    let short = write(dir.path(), "short.json", "[0,1]");
    let cases: Vec<Vec<&str>> = vec![
        vec!["search", "--ham", bad.to_str().unwrap()],
        vec!["search", "--ham", wrong_field.to_str().unwrap()],
        vec!["search", "--ham", "/nonexistent/h.json"],
        vec!["terms", "--ham", &good, "--assignment", "/nonexistent/a.json"],
        vec!["terms", "--ham", &good, "--assignment", short.to_str().unwrap()],
        vec!["search", "--ham", &good, "--budget", "10", "--warmup", "20"],
        vec!["search", "--ham", &good, "--stagnation", "ten", "0.1"],
    ];
    for args in cases {
        let o = cliffseed(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {o:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn bitstring_assignment_zeroes_off_diagonal_terms() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "mixed", 2, &[("ZI", 0.5), ("XX", 0.4), ("ZZ", -0.3), ("XY", 0.2), ("IY", 0.1)]);
    // Final-layer RY on qubit 0 set to a half turn: the state is |10>.
    let a = write(dir.path(), "a.json", "[0,0,0,0,2,0,0,0]");
    let o = cliffseed(&["terms", "--ham", &h, "--assignment", a.to_str().unwrap(), "--hf", "--exact"]);
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 5);
    let labels: Vec<&str> = rows.iter().map(|r| field(r, "term_label")).collect();
    assert_eq!(&labels[..2], ["ZI", "ZZ"]);
    for r in &rows {
        let e: f64 = field(r, "expectation_cafqa").parse().unwrap();
        match field(r, "term_label") {
            "ZI" | "ZZ" => assert_eq!(e, -1.0),
            _ => assert_eq!(e, 0.0),
        }
        let hf: f64 = field(r, "expectation_hf").parse().unwrap();
        let exact: f64 = field(r, "expectation_exact").parse().unwrap();
        assert!(hf.abs() <= 1.0 && exact.abs() <= 1.0 + 1e-9);
    }
}

#[test]
fn bell_assignment_saturates_xx_and_zz() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "bell", 2, &[("XX", 1.0), ("ZZ", 1.0)]);
    // Quarter-turn RY on qubit 0 then the CX ladder: (|00> + |11>)/sqrt 2.
    let a = write(dir.path(), "a.json", "[1,0,0,0,0,0,0,0]");
    let out = dir.path().join("terms.csv");
    let o = cliffseed(&["terms", "--ham", &h, "--assignment", a.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(field(r, "expectation_cafqa").parse::<f64>().unwrap().abs(), 1.0);
    }
}

#[test]
fn compare_reports_xx_metrics() {
    let dir = TempDir::new().unwrap();
    let h = ham(dir.path(), "xx2", 2, &[("XX", 1.0)]);
    let o = cliffseed(&["compare", "--ham", &h, "--strategy", "exhaustive"]);
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&stdout(&o));
    let r = &rows[0];
    assert_eq!(field(r, "name"), "xx2");
    assert_eq!(field(r, "E_exact").parse::<f64>().unwrap(), -1.0);
    assert_eq!(field(r, "E_hf").parse::<f64>().unwrap(), 0.0);
    assert_eq!(field(r, "E_cafqa").parse::<f64>().unwrap(), -1.0);
    assert_eq!(field(r, "recovered_pct").parse::<f64>().unwrap(), 100.0);
    assert_eq!(field(r, "chem_accurate"), "true");
    assert_eq!(field(r, "error"), "");
}

#[test]
fn compare_keeps_partial_results() {
    let dir = TempDir::new().unwrap();
    let id = ham(dir.path(), "identity", 1, &[("I", -1.5)]);
    let o = cliffseed(&["compare", "--ham", &id, "/nonexistent/h.json", "--strategy", "exhaustive"]);
    assert!(o.status.success(), "{o:?}");
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 2);
    for key in ["E_exact", "E_hf", "E_cafqa"] {
        assert_eq!(field(&rows[0], key).parse::<f64>().unwrap(), -1.5);
    }
    assert_eq!(field(&rows[0], "recovered_pct"), "");
    assert!(field(&rows[0], "error").contains("degenerate denominator"));
    assert!(field(&rows[1], "error").contains("nonexistent"));

    let o = cliffseed(&["compare", "--ham", "/nonexistent/h.json"]);
    assert_eq!(o.status.code(), Some(2));
}

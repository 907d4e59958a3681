use std::process::{Command, Output};

use pdmahler::decomposition::{decompose_mpd, PrimitiveDecomposition};
use pdmahler::solver::IdentityCertificate;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pdmahler"))
        .args(args)
        .env_remove("PDMAHLER_PREC")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    serde_json::from_str(&stdout(&all)).unwrap()
}

fn number(v: &Value) -> f64 {
    v.as_str().unwrap().parse().unwrap()
}

#[test]
fn dilog_values() {
    let cl = json(&["dilog", "--clausen", "1", "3"]);
    assert!((number(&cl["value"]) - 0.676_627_737_606_435_7).abs() < 1e-15);
    let catalan = json(&["dilog", "--bw", "i"]);
    assert!(catalan["value"].as_str().unwrap().starts_with("0.9159655941772190150546035149323841107741"));
    let zero = json(&["dilog", "--bw", "1"]);
    assert_eq!(number(&zero["value"]), 0.0);
    let li = json(&["dilog", "0.5"]);
    let expected = std::f64::consts::PI.powi(2) / 12.0 - 2f64.ln().powi(2) / 2.0;
    assert!((number(&li["re"]) - expected).abs() < 1e-15);
}

#[test]
fn character_facts() {
    let c = json(&["char", "10.7"]);
    assert_eq!(c["conductor"], "5");
    assert_eq!(c["induced_by"], "5.2");
    assert_eq!(c["gamma"], "1 - 2i");
    assert_eq!(c["parity"], "odd");
    assert_eq!(c["order"], "4");
}

#[test]
fn decompositions() {
    let m2 = json(&["mpd", "2"]);
    let dec: PrimitiveDecomposition = serde_json::from_value(m2["decomposition"].clone()).unwrap();
    assert_eq!(dec, decompose_mpd(2));
    let text = stdout(&["spd", "12"]);
    assert!(text.contains("S_12/(2pi) = (38) L'(3.2) + (21) L'(4.3)"), "{text}");
    let sub = json(&["decompose", "m(P_4)"]);
    let dec: PrimitiveDecomposition = serde_json::from_value(sub["decomposition"].clone()).unwrap();
    assert_eq!(dec, decompose_mpd(4));
}

#[test]
fn lvalue_of_conductor_four() {
    let l = json(&["--prec", "30", "lvalue", "4.3"]);
    // L'(χ_{-4}, -1) = 2G/π
    let expected = 2.0 * 0.915_965_594_177_219 / std::f64::consts::PI;
    assert!((number(&l["lprime_re"]) - expected).abs() < 1e-14);
}

#[test]
fn solve_and_verify_round_trip() {
    let cert = json(&["solve", "--conductor", "4", "--dmax", "2"]);
    let parsed: IdentityCertificate = serde_json::from_value(cert.clone()).unwrap();
    assert_eq!(parsed.to_string(), "m(P1 P2^2) = 2 L'(chi_-4, -1)");
    assert_eq!(cert["exact"], true);

    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    std::fs::write(&good, serde_json::to_string(&cert).unwrap()).unwrap();
    let out = run(&["verify", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));

    let mut bad = cert.clone();
    bad["multiple"] = Value::String("3/1".into());
    let bad_path = dir.path().join("bad.json");
    std::fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let out = run(&["--format", "json", "verify", bad_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["exact"], "false");
    assert!(number(&report["residual"]) > 0.1);

    let junk = dir.path().join("junk.json");
    std::fs::write(&junk, "{").unwrap();
    assert_eq!(run(&["verify", junk.to_str().unwrap()]).status.code(), Some(3));
}

#[test]
fn solve_complex_pair() {
    let cert = json(&["solve", "--character", "5.2", "--dmax", "8"]);
    let exps: Vec<(String, i64)> = serde_json::from_value(cert["exponents"].clone()).unwrap();
    let expected = [("P1", 720), ("P4", -240), ("P5", -21), ("P6", -28), ("P7", -36), ("P8", -45)];
    assert_eq!(exps.len(), expected.len());
    for ((id, e), (eid, ee)) in exps.iter().zip(expected) {
        assert_eq!((id.as_str(), *e), (eid, ee));
    }
    assert_eq!(cert["multiple"], "30/1");
}

#[test]
fn no_solution_is_reported() {
    let v = json(&["solve", "--conductor", "7", "--dmax", "2"]);
    assert_eq!(v["status"], "no_solution");
}

#[test]
fn oracle_values() {
    let smyth = json(&["oracle", "1+x+y"]);
    assert!((number(&smyth["value"]) - 0.323_065_947_219).abs() < 1e-9);
    let monomial = json(&["oracle", "x*y"]);
    assert_eq!(number(&monomial["value"]), 0.0);
    assert_eq!(run(&["oracle", "1+x+"]).status.code(), Some(3));
    assert_eq!(run(&["oracle", "0"]).status.code(), Some(3));
}

#[test]
fn ray_table_passes() {
    let out = stdout(&["--format", "csv", "oracle", "--ray-table"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 7);
    assert!(lines[1..].iter().all(|l| l.ends_with(",pass")), "{out}");
}

#[test]
fn table_checks_pass() {
    for name in ["mpd", "sd", "constants", "quadratic", "complex"] {
        let out = run(&["table", name, "--check"]);
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let sd = stdout(&["--format", "csv", "table", "sd", "--check"]);
    let erratum: Vec<&str> = sd.lines().filter(|l| l.contains("erratum 17.12->17.11")).collect();
    assert_eq!(erratum.len(), 1);
    assert!(erratum[0].starts_with("S_17/(2pi)"));
}

#[test]
fn configuration_errors() {
    assert_eq!(run(&["--prec", "14", "mpd", "1"]).status.code(), Some(3));
    assert_eq!(run(&["--nodes", "100", "oracle", "1+x+y"]).status.code(), Some(3));
    assert_eq!(run(&["char", "4.2"]).status.code(), Some(3));
    assert_eq!(run(&["table", "nine"]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["dilog", "--bw", "1+"]).status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_pdmahler"))
        .args(["--format", "json", "mpd", "1"])
        .env("PDMAHLER_PREC", "20")
        .output()
        .unwrap();
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["value"].as_str().unwrap().split('.').nth(1).unwrap().len(), 20);
}

#[test]
fn output_is_deterministic() {
    for args in [&["--format", "csv", "table", "mpd"][..], &["--format", "json", "spd", "20"][..]] {
        assert_eq!(stdout(args), stdout(args));
    }
}

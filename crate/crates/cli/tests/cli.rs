use std::process::{Command, Output};

use serde_json::{json, Value};

const CUBE: &str = r#"{"prefix":[],"tail":{"kind":"constant","value":3}}"#;
const ALTERNATING: &str = r#"{"prefix":[],"tail":{"kind":"periodic","pattern":[1.5,1.8]}}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varexp")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn ok(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    json_of(&out)
}

#[test]
fn norm_of_basis_vector() {
    let input = format!(r#"{{"a":{{"entries":[[4,1,0]]}},"p":{CUBE}}}"#);
    let v = ok(&["norm", "-i", &input, "--deterministic"]);
    assert_eq!(v["norm"], json!(1.0));
    assert_eq!(v["tool"], "varexp");
    assert_eq!(v["input"]["a"]["entries"][0][0], 4);
    assert!(v.get("timestamp").is_none());
    assert!(ok(&["norm", "-i", &input]).get("timestamp").is_some());
}

#[test]
fn norm_solves_cubic() {
    let input = r#"{"a":{"entries":[[1,1,0],[2,1,0]]},"p":{"prefix":[1],"tail":{"kind":"constant","value":3}}}"#;
    let v = ok(&["norm", "-i", input]);
    assert!((v["norm"].as_f64().unwrap() - 1.465571231876768).abs() < 1e-10);
}

#[test]
fn modular_and_clarkson() {
    let input = format!(r#"{{"a":{{"entries":[[1,1,0],[2,1,0]]}},"p":{CUBE}}}"#);
    assert_eq!(ok(&["modular", "-i", &input])["modular"], json!(2.0));
    let input = format!(r#"{{"a":{{"entries":[[1,1,0]]}},"b":{{"entries":[[1,1,0]]}},"p":{CUBE}}}"#);
    let v = ok(&["clarkson", "-i", &input]);
    assert_eq!(v["gap"], json!(4.0));
    assert_eq!(v["disjoint"], json!(false));
}

#[test]
fn theta_check_verdicts() {
    let input = format!(r#"{{"theta":{{"kind":"shift","offset":1}},"p":{CUBE}}}"#);
    assert_eq!(ok(&["theta-check", "-i", &input])["verdict"], "isometric");
    let input = format!(r#"{{"theta":{{"kind":"shift","offset":1}},"p":{ALTERNATING}}}"#);
    let v = ok(&["theta-check", "-i", &input]);
    assert_eq!(v["verdict"], "not_isometric");
    assert_eq!(v["j"], 1);
    assert!((v["witness_norm"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((v["witness_image_norm"].as_f64().unwrap() - 1.0).abs() > 1e-6);
    let input = format!(r#"{{"theta":{{"kind":"shift","offset":2}},"p":{ALTERNATING}}}"#);
    assert_eq!(ok(&["theta-check", "-i", &input])["verdict"], "isometric");
}

#[test]
fn example_41() {
    let v = ok(&["example", "41", "--n", "20", "--deterministic"]);
    assert!((v["modular_a"].as_f64().unwrap() - 1.5961632439130233).abs() < 1e-12);
    assert!((v["modular_Sa"].as_f64().unwrap() - 3.597_739_657_143_682).abs() < 1e-12);
    let v = ok(&["example", "42", "--n", "83"]);
    assert_eq!(v["pass"], true);
    assert!(v["metrics"]["modular_Sa"].as_f64().unwrap() > 5.0);
}

#[test]
fn apply_check_and_recover_round_trip() {
    let op = r#"{"kind":"lamperti","h":[[2,0.7937005259840998,0.0],[3,0.7937005259840998,0.0]],"iso":{"images":[[1,[2,3]]]}}"#;
    let v = ok(&["apply", "-i", &format!(r#"{{"operator":{op},"x":{{"entries":[[1,1,0]]}}}}"#)]);
    assert_eq!(v["result"]["entries"].as_array().unwrap().len(), 2);

    let v = ok(&["check-op", "-i", &format!(r#"{{"operator":{op},"p":{CUBE}}}"#)]);
    assert_eq!(v["isomodular"]["verdict"], "isomodular");
    assert_eq!(v["isometry"]["verdict"], "pass");

    let v = ok(&["recover", "-i", &format!(r#"{{"operator":{op},"p":{CUBE}}}"#)]);
    assert_eq!(v["reconstruction_exact"], true);
    let recovered = &v["operator"];
    let original: Value = serde_json::from_str(op).unwrap();
    assert_eq!(recovered, &original);
    // The recovered operator is valid input again.
    let again = ok(&["recover", "-i", &format!(r#"{{"operator":{recovered},"p":{CUBE}}}"#)]);
    assert_eq!(again["operator"], *recovered);
}

#[test]
fn shift_witness_for_non_isomodular_truncation() {
    let p = r#"{"prefix":[1],"tail":{"kind":"constant","value":3}}"#;
    let input = format!(r#"{{"operator":{{"kind":"injection","rule":{{"kind":"shift","offset":1}}}},"p":{p}}}"#);
    let v = ok(&["check-op", "-i", &input, "--n", "3"]);
    assert_eq!(v["isomodular"]["verdict"], "not_isomodular");
    assert_eq!(v["isometry"]["verdict"], "fail");
}

#[test]
fn suites_are_byte_identical_under_deterministic() {
    let input = format!(r#"{{"p":{ALTERNATING}}}"#);
    for args in [
        vec!["suite", "clarkson", "-i", &input, "--trials", "300", "--seed", "5", "--deterministic"],
        vec!["suite", "structure", "-i", &input, "--trials", "20", "--seed", "5", "--deterministic"],
        vec!["suite", "orthogonality", "-i", &input, "--trials", "20", "--seed", "5", "--deterministic"],
        vec!["suite", "shift-dichotomy", "--trials", "100", "--seed", "5", "--deterministic"],
        vec!["explore", "-i", &input, "--trials", "30", "--seed", "5", "--deterministic"],
    ] {
        let (a, b) = (run(&args), run(&args));
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stdout));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn suite_failure_exits_one() {
    // Column modular 1.2^3 != 1 with |h| = 1.2.
    let input = format!(r#"{{"p":{CUBE},"operators":[{{"kind":"matrix","n":1,"columns":[[1,[[1,1.2,0]]]]}}]}}"#);
    let out = run(&["suite", "structure", "-i", &input, "--deterministic"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["pass"], false);
    assert!(!v["failures"].as_array().unwrap().is_empty());
}

#[test]
fn configuration_errors_exit_two() {
    for args in [
        vec!["norm", "-i", "{not json"],
        vec!["norm"],
        vec!["norm", "-i", r#"{"a":{"entries":[]},"p":{"prefix":[0.5],"tail":{"kind":"constant","value":3}}}"#],
        vec!["frobnicate"],
        vec!["norm", "--tol", "-1", "-i", "{}"],
        vec!["suite", "clarkson", "-i", r#"{"p":{"prefix":[1.5],"tail":{"kind":"constant","value":3}}}"#],
        vec!["modular", "-i", "/nonexistent/input.json"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let v = json_of(&out);
        assert!(v["error"]["kind"].is_string(), "{args:?}");
        assert!(v["error"]["message"].is_string());
    }
}

#[test]
fn file_input_and_output() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("in.json");
    let output = dir.path().join("out.json");
    std::fs::write(&input, format!(r#"{{"a":{{"entries":[[1,2,0]]}},"p":{CUBE}}}"#)).unwrap();
    let out = run(&["modular", "-i", input.to_str().unwrap(), "-o", output.to_str().unwrap(), "--deterministic"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&output).unwrap()).unwrap();
    assert_eq!(v["modular"], json!(8.0));
}

#[test]
fn sequence_output_reparses() {
    let op = r#"{"kind":"injection","rule":{"kind":"permutation","table":[3,1,2]}}"#;
    let x = r#"{"entries":[[1,0.1,0.30000000000000004],[2,-1e-300,7.0]]}"#;
    let v = ok(&["apply", "-i", &format!(r#"{{"operator":{op},"x":{x}}}"#)]);
    let y = v["result"].to_string();
    let back = ok(&["apply", "-i", &format!(r#"{{"operator":{{"kind":"injection","rule":{{"kind":"permutation","table":[2,3,1]}}}},"x":{y}}}"#)]);
    assert_eq!(back["result"], serde_json::from_str::<Value>(x).unwrap());
}

use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn system(name: &str) -> String {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../systems");
    root.join(name).display().to_string()
}

fn relrw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relrw"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("valid JSON on stdout")
}

fn trs_file(text: &str) -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

#[test]
fn parallel_reduct_under_context() {
    let add = system("add.trs");
    let out = relrw(&["reduce", "--file", &add, "--term", "succ(add(zero,zero))", "--mode", "parallel"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).lines().any(|l| l.trim() == "succ(zero)"));

    let out = relrw(&["reduce", "--file", &add, "--term", "succ(add(zero,zero))", "--mode", "ground", "--json"]);
    assert_eq!(json(&out)["output"]["reducts"], serde_json::json!([]));
}

#[test]
fn reduce_steps_iterate() {
    let add = system("add.trs");
    let out = relrw(&[
        "reduce", "--file", &add, "--term", "add(succ(zero),zero)", "--mode", "seq", "--steps", "2", "--json",
    ]);
    assert_eq!(json(&out)["output"]["reducts"], serde_json::json!(["succ(zero)"]));
}

#[test]
fn add_is_confluent_by_both_techniques() {
    let add = system("add.trs");
    for technique in ["tml", "parallel-moves"] {
        let out = relrw(&["check", "confluence", "--file", &add, "--technique", technique, "--depth", "3"]);
        assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
        assert!(stdout(&out).contains("PASS diamond"));
    }
}

#[test]
fn lambda_parallel_diamond() {
    // holds on every term up to size 9; the first failing peak has size 10
    let out = relrw(&["lambda", "confluence", "--mode", "parallel", "--size", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let out = relrw(&["lambda", "confluence", "--mode", "parallel", "--size", "10", "--scope", "1", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    let witness = doc["verdicts"][0]["witness"].as_str().unwrap();
    assert!(witness.starts_with(r"peak (\.(\.1) 0) ((\.1) 0)"), "{witness}");
}

#[test]
fn lambda_full_diamond_holds() {
    let out = relrw(&["lambda", "confluence", "--mode", "full", "--size", "7", "--scope", "2"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn lambda_reduce_parses_de_bruijn() {
    let out = relrw(&["lambda", "reduce", "--term", r"(\.(\.0) 0) ((\.0) 1)", "--mode", "full", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let reducts = json(&out)["output"]["reducts"].as_array().unwrap().clone();
    assert!(reducts.contains(&Value::from("1")));
}

#[test]
fn critical_pairs_listed() {
    let out = relrw(&["critical-pairs", "--file", &system("nested.trs"), "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    let pairs = doc["output"]["critical_pairs"].as_array().unwrap();
    assert_eq!(pairs.len(), 1);
    assert_eq!(pairs[0]["peak"], "f(g(a))");
    assert_eq!((pairs[0]["left"].as_str(), pairs[0]["right"].as_str()), (Some("a"), Some("f(b)")));

    let out = relrw(&["critical-pairs", "--file", &system("add.trs")]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn overlapping_constants_are_not_orthogonal() {
    let out = relrw(&["orthogonal", "--file", &system("overlap.trs"), "--depth", "2", "--json"]);
    assert_eq!(out.status.code(), Some(1));
    let doc = json(&out);
    let verdicts = doc["verdicts"].as_array().unwrap();
    let root = verdicts.iter().find(|v| v["name"] == "unique-root-steps").unwrap();
    assert_eq!(root["pass"], false);
    assert_eq!(root["witness"], "(b, c)");
    let premise = verdicts.iter().find(|v| v["name"] == "kleisli-premise").unwrap();
    assert_eq!(premise["pass"], false);
}

#[test]
fn law_report_is_byte_stable_and_anchored() {
    let add = system("add.trs");
    let args = ["check", "laws", "--file", &add, "--trials", "5", "--seed", "3", "--json"];
    let first = relrw(&args);
    let second = relrw(&args);
    assert_eq!(first.stdout, second.stdout);
    let doc = json(&first);
    assert_eq!(doc["timing"], Value::Null);
    for v in doc["verdicts"].as_array().unwrap() {
        assert!(!v["anchor"].as_str().unwrap().is_empty());
    }
    // associativity of substitution is the one law that does not hold
    let failing: Vec<&str> = doc["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|v| v["pass"] == false)
        .map(|v| v["name"].as_str().unwrap())
        .collect();
    assert_eq!(failing, vec!["subst-associative"]);
    assert_eq!(first.status.code(), Some(1));
}

#[test]
fn mutant_law_is_refuted() {
    let add = system("add.trs");
    let out = relrw(&["check", "laws", "--file", &add, "--trials", "20", "--mutant", "--json"]);
    let doc = json(&out);
    let mutant = doc["verdicts"]
        .as_array()
        .unwrap()
        .iter()
        .find(|v| v["name"] == "mutant-subst-compref")
        .unwrap()
        .clone();
    assert_eq!(mutant["pass"], false);
    assert!(mutant["witness"].as_str().unwrap().contains("trial"));
}

#[test]
fn timing_is_opt_in() {
    let out = relrw(&["critical-pairs", "--file", &system("add.trs"), "--json", "--timing"]);
    assert!(json(&out)["timing"].is_f64());
}

#[test]
fn variable_lhs_is_rejected() {
    let f = trs_file("sig zero/0\nvars x\nrule x -> zero\n");
    let out = relrw(&["critical-pairs", "--file", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("lhs is a variable"), "{}", stderr(&out));
    assert!(stderr(&out).contains("rule 0"));
}

#[test]
fn unbound_rhs_variable_is_rejected() {
    let f = trs_file("sig f/1 g/1\nvars x y\nrule f(x) -> g(y)\n");
    let out = relrw(&["critical-pairs", "--file", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("rhs variable not bound"), "{}", stderr(&out));
}

#[test]
fn syntax_errors_carry_line_and_column() {
    let f = trs_file("sig f/1\nvars x\nrule f(x -> x\n");
    let out = relrw(&["critical-pairs", "--file", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("3:10"), "{}", stderr(&out));
}

#[test]
fn usage_errors_exit_with_two() {
    let out = relrw(&["reduce", "--file", &system("add.trs"), "--term", "zero", "--mode", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
    let out = relrw(&["reduce", "--file", "/nonexistent.trs", "--term", "zero"]);
    assert_eq!(out.status.code(), Some(2));
    let out = relrw(&["reduce", "--file", &system("add.trs"), "--term", "add(zero)"]);
    assert_eq!(out.status.code(), Some(2));
}

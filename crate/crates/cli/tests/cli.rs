use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    format!("{}/../core/tests/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn scratch(name: &str, contents: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proofnet")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn example_has_one_proof() {
    let out =
        run(&["prove", "--lexicon", &fixture("example_lexicon.json"), "--regime", &fixture("example_regime.json")]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["matchings"], "36");
    let proofs = v["proofs"].as_array().unwrap();
    assert_eq!(proofs.len(), 1);
    let term = fs::read_to_string(fixture("example_term.txt")).unwrap();
    let expected = proofnet::term::parse_term(term.trim()).unwrap();
    let got = proofnet::term::parse_term(proofs[0]["term"].as_str().unwrap()).unwrap();
    assert!(got.alpha_eq(&expected));
    assert_eq!(proofs[0]["steps"].as_array().unwrap().len(), 1);
    assert_eq!(proofs[0]["steps"][0]["word"], "rr");
    assert_eq!(proofs[0]["structural"], 1);
}

#[test]
fn example_fails_under_nl_alone() {
    let out = run(&["prove", "--lexicon", &fixture("example_lexicon.json"), "--format", "term"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).is_empty());
}

#[test]
fn single_word() {
    let lex = scratch("single.json", r#"{"words":[{"w":"w","f":"np"}],"goal":"np"}"#);
    let out = run(&["prove", "--lexicon", &lex, "--format", "term"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "x1");
    let out = run(&["prove", "--lexicon", &lex, "--goal", "s"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn composition_needs_associativity() {
    let lex = scratch("compose.json", r#"{"words":[{"w":"f","f":"a/b"},{"w":"g","f":"b/c"}],"goal":"a/c"}"#);
    let l = scratch("l.json", r#"{"default":"L"}"#);
    let out = run(&["prove", "--lexicon", &lex, "--regime", &l, "--format", "term"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), r"\y1.(x1 (x2 y1))");
    let nl = scratch("nl.json", r#"{"default":"NL"}"#);
    assert_eq!(code(&run(&["prove", "--lexicon", &lex, "--regime", &nl])), 1);
}

#[test]
fn matching_count() {
    let out = run(&["match", "--lexicon", &fixture("example_lexicon.json"), "--count-only"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).trim(), "36");
    let lex = scratch("unbalanced.json", r#"{"words":[{"w":"w","f":"np"}],"goal":"s"}"#);
    assert_eq!(code(&run(&["match", "--lexicon", &lex])), 1);
}

#[test]
fn generate_uniform_and_oracle() {
    let out = run(&["generate", "--words", "3", "--format", "term"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out).lines().count(), 1);

    let gold_term = r"x2 \y1.(x1 (y1 x3))";
    let out = run(&["export", "--term", gold_term, "--format", "json"]);
    assert_eq!(code(&out), 0);
    let gold = scratch("gold.json", &stdout(&out));
    let out = run(&["generate", "--gold", &gold, "--scorer", "oracle"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v[0]["term"], gold_term);
    assert_eq!(v[0]["fscore"]["f1"], 1.0);
    assert_eq!(v[0]["actions"].as_array().unwrap().last().unwrap()["op"], "stop");

    assert_eq!(code(&run(&["generate", "--words", "2", "--scorer", "oracle"])), 2);
}

#[test]
fn compare_scores_nets() {
    let a = scratch("cmp_a.json", &stdout(&run(&["export", "--term", "x1 (x2 x3)", "--format", "json"])));
    let b = scratch("cmp_b.json", &stdout(&run(&["export", "--term", "(x1 x2) x3", "--format", "json"])));
    let same: Value = serde_json::from_str(&stdout(&run(&["compare", "--gold", &a, "--predicted", &a]))).unwrap();
    assert_eq!(same["f1"], 1.0);
    let diff: Value = serde_json::from_str(&stdout(&run(&["compare", "--gold", &a, "--predicted", &b]))).unwrap();
    assert!(diff["f1"].as_f64().unwrap() < 1.0);
}

#[test]
fn label_semantic_and_directional() {
    let net = scratch("label.json", &stdout(&run(&["export", "--term", "x1 x2", "--format", "json"])));
    let out = run(&["label", "--net", &net]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["typing"], "x1: A -o B\nx2: A\ngoal: B");
    assert!(v.get("lexicon").is_none());

    let lex = fixture("example_lexicon.json");
    let proof = run(&["prove", "--lexicon", &lex, "--regime", &fixture("example_regime.json")]);
    let v: Value = serde_json::from_str(&stdout(&proof)).unwrap();
    let structure = scratch("structure.json", &v["proofs"][0]["net"].to_string());
    let out = run(&["label", "--net", &structure, "--lexicon", &lex]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["lexicon"], serde_json::from_str::<Value>(&fs::read_to_string(&lex).unwrap()).unwrap());
}

#[test]
fn label_names_words() {
    let lex = scratch("single_label.json", r#"{"words":[{"w":"w","f":"np"}],"goal":"np"}"#);
    let net = scratch("single_net.json", &stdout(&run(&["export", "--term", "x1", "--format", "json"])));
    let v: Value = serde_json::from_str(&stdout(&run(&["label", "--net", &net, "--lexicon", &lex]))).unwrap();
    assert_eq!(v["typing"], "w: A\ngoal: A");
    let labelling = scratch("single_labelling.json", r#"{"atoms":{"A":"np"},"connectives":{}}"#);
    let v: Value =
        serde_json::from_str(&stdout(&run(&["label", "--net", &net, "--lexicon", &lex, "--labelling", &labelling])))
            .unwrap();
    assert_eq!(v["lexicon"]["words"][0]["f"], "np");
    assert_eq!(v["lexicon"]["goal"], "np");
}

#[test]
fn backward_counts() {
    let out = run(&["backward", "--words", "2", "--max-par", "0"]);
    assert_eq!(code(&out), 0);
    let mut terms: Vec<String> = stdout(&out).lines().map(str::to_string).collect();
    terms.sort();
    assert_eq!(terms, vec!["x1 x2", "x2 x1"]);
}

#[test]
fn export_dot() {
    let out = run(&["export", "--lexicon", &fixture("example_lexicon.json")]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).starts_with("digraph"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(code(&run(&["prove", "--lexicon", "/nonexistent/lexicon.json"])), 2);
    let bad = scratch("bad.json", r#"{"words":[{"w":"w","f":"np/"}],"goal":"np"}"#);
    assert_eq!(code(&run(&["prove", "--lexicon", &bad])), 2);
    assert_eq!(code(&run(&["export", "--term", "x1 x1"])), 2);
}

#[test]
fn scorer_errors_exit_three() {
    let out = run(&["generate", "--words", "2", "--scorer", "echo nonsense"]);
    assert_eq!(code(&out), 3);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("nonsense"));
    let out = run(&["generate", "--words", "2", "--scorer", r#"echo '{"weights":[2]}'"#]);
    assert_eq!(code(&out), 3);
}

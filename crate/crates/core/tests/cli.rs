use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(name);
    let value: Value = serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&value).expect("schema compiles")
}

fn assert_valid(schema_name: &str, doc: &Value) {
    let compiled = schema(schema_name);
    let msgs: Vec<String> = match compiled.validate(doc) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{e} at {}", e.instance_path)).collect(),
    };
    panic!("{schema_name}: {msgs:#?}");
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_trivalent")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::write(&path, contents).unwrap();
    path
}

const PSI3: &str = "G(edb -> F(cert | fl))";

const CLASSICAL: &str = r#"{
  "atoms": ["p"],
  "states": [
    { "id": "a", "labels": { "p": "T" } },
    { "id": "b", "labels": { "p": "F" } }
  ],
  "initial": ["a"],
  "transitions": [["a", "b"], ["b", "a"]]
}"#;

#[test]
fn markdown_replay_of_the_example() {
    let out = run(&[
        "check",
        "--model", fixture("stereo.pks").to_str().unwrap(),
        "--property", PSI3,
        "--automaton", fixture("a_ref.ba").to_str().unwrap(),
        "--format", "markdown",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("# Verdict: maybe"));
    assert!(text.contains("s0, s2, s5, (s7)^ω"));
    let header = text.lines().find(|l| l.starts_with("| Step")).unwrap();
    assert_eq!(header, "| Step | Component | Rule |");
    let first_row = text.lines().skip_while(|l| !l.starts_with("|---")).nth(1).unwrap();
    assert!(first_row.starts_with("| Fail | ⟨s1,q1⟩, ⟨s2,q1⟩, ⟨s3,q1⟩, ⟨s4,q1⟩, ⟨s5,q1⟩, ⟨s6,q1⟩, ⟨s7,q1⟩ |"));
    assert!(text.contains("s1 ⊨ μ(q1) = F (cert \\| fl)"));
    // every table row has exactly three cells
    for row in text.lines().filter(|l| l.starts_with("| ")) {
        let cells = row.replace("\\|", "").matches('|').count();
        assert_eq!(cells, 4, "{row}");
    }
}

#[test]
fn translated_automaton_gives_the_same_verdict() {
    let out = run(&["check", "--model", fixture("stereo.pks").to_str().unwrap(), "--property", PSI3]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "maybe");
    assert_eq!(doc["counterexample"]["path"], "s0, s2, s5, (s7)^ω");
    assert_valid("result.schema.json", &doc);
    assert_valid("proof.schema.json", &doc["proof"]);
}

#[test]
fn classical_model_and_true_property() {
    let model = scratch("classical.pks", CLASSICAL);
    let out = run(&["check", "--model", model.to_str().unwrap(), "--property", "true", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["verdict"], "true");
    assert!(doc.get("counterexample").is_none());
    let steps = doc["proof"]["steps"].as_array().unwrap();
    assert_eq!(steps.last().unwrap()["kind"], "Conclusion");
    assert_valid("result.schema.json", &doc);
}

#[test]
fn property_from_file() {
    let model = scratch("classical2.pks", CLASSICAL);
    let prop = scratch("prop.ltl", "G F p\n");
    let out = run(&[
        "check", "--model", model.to_str().unwrap(), "--property-file", prop.to_str().unwrap(), "--format", "plain",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("verdict: true"));
}

#[test]
fn strict_validation_reports_non_total_state() {
    let broken = CLASSICAL.replace(r#"["b", "a"]"#, r#"["b", "zz"]"#);
    let model = scratch("dangling.pks", &broken);
    let out = run(&["check", "--model", model.to_str().unwrap(), "--property", "G p", "--strict-validate"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("non-total state b"), "{err}");
    assert!(err.contains("dangling transition b -> zz"), "{err}");
    assert_valid("error.schema.json", &serde_json::from_str(&err).unwrap());
}

#[test]
fn strict_validation_rejects_warnings_only_when_asked() {
    let extra = CLASSICAL.replace(r#"{ "p": "F" }"#, r#"{ "p": "F", "ghost": "T" }"#);
    let model = scratch("ghost.pks", &extra);
    let lenient = run(&["check", "--model", model.to_str().unwrap(), "--property", "G p"]);
    assert_eq!(lenient.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&lenient)).unwrap();
    assert_eq!(doc["warnings"][0], "warning: label for undeclared atom ghost at state b");
    let strict = run(&["check", "--model", model.to_str().unwrap(), "--property", "G p", "--strict-validate"]);
    assert_eq!(strict.status.code(), Some(2));
}

#[test]
fn malformed_inputs_are_status_two() {
    let model = scratch("garbage.pks", "{ \"atoms\": [\"p\"], \"states\": [ }");
    let out = run(&["check", "--model", model.to_str().unwrap(), "--property", "p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 1"), "{}", stderr(&out));

    let good = scratch("good.pks", CLASSICAL);
    let out = run(&["check", "--model", good.to_str().unwrap(), "--property", "(p & q", "--format", "plain"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unbalanced"), "{}", stderr(&out));

    let out = run(&["check", "--model", good.to_str().unwrap(), "--property", "G q"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("atom q"));

    let out = run(&["check", "--model", "/no/such/file.pks", "--property", "p"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let model = fixture("stereo.pks");
    let args = [
        "check", "--model", model.to_str().unwrap(), "--property", PSI3, "--emit-proof",
        "--emit-counterexample", "--emit-product",
    ];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, second.stdout);
    let doc: Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_valid("result.schema.json", &doc);
    assert_eq!(doc["products"].as_array().unwrap().len(), 2);
}

#[test]
fn emit_flags_select_evidence() {
    let out = run(&["check", "--model", fixture("stereo.pks").to_str().unwrap(), "--property", PSI3, "--emit-counterexample"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc.get("proof").is_none());
    assert!(doc.get("counterexample").is_some());
    assert!(doc.get("products").is_none());
}

#[test]
fn oracle_on_the_example() {
    let out = run(&["oracle", "--model", fixture("stereo.pks").to_str().unwrap(), "--property", PSI3]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_valid("oracle.schema.json", &doc);
    assert_eq!(doc["completions"].as_array().unwrap().len(), 16);
    assert!(doc["satisfied"].as_u64().unwrap() >= 1);
    assert!(doc["violated"].as_u64().unwrap() >= 1);
    assert_eq!(doc["verdict"], "maybe");
    assert_eq!(doc["consistent"], true);
}

#[test]
fn oracle_on_a_classical_model_has_one_row() {
    let model = scratch("classical3.pks", CLASSICAL);
    let out = run(&["oracle", "--model", model.to_str().unwrap(), "--property", "G F p", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("| 1 |")).count(), 1);
    assert!(!text.contains("| 2 |"));
}

#[test]
fn oracle_enforces_the_completion_cap() {
    let states: Vec<String> = (0..25)
        .map(|i| format!(r#"{{ "id": "s{i}", "labels": {{ "p": "U" }} }}"#))
        .collect();
    let transitions: Vec<String> = (0..25).map(|i| format!(r#"["s{i}", "s{}"]"#, (i + 1) % 25)).collect();
    let model = scratch(
        "unknowns.pks",
        &format!(
            r#"{{ "atoms": ["p"], "states": [{}], "initial": ["s0"], "transitions": [{}] }}"#,
            states.join(","),
            transitions.join(",")
        ),
    );
    let out = run(&["oracle", "--model", model.to_str().unwrap(), "--property", "F p"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("25 unknown values exceed the completion cap of 20"));
}

#[test]
fn replay_subcommand_passes() {
    let out = run(&["replay"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["checks"].as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn fixture_documents_match_their_schemas() {
    for (file, schema_name) in [("stereo.pks", "pks.schema.json"), ("a_ref.ba", "automaton.schema.json")] {
        let doc: Value = serde_json::from_str(&fs::read_to_string(fixture(file)).unwrap()).unwrap();
        assert_valid(schema_name, &doc);
    }
}

#[test]
fn missing_property_is_a_usage_error() {
    let out = run(&["check", "--model", "x.pks"]);
    assert_eq!(out.status.code(), Some(2));
}

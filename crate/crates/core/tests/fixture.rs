mod common;

use trivalent::automata::{ltl_to_buchi, Buchi};
use trivalent::engine::{check, check_with_automaton, Approximation, VerdictValue};
use trivalent::fixtures::{a_ref, psi3, skeleton_matches, stereo, verify_fixture};
use trivalent::ltl::{parse, to_nnf};
use trivalent::oracle::{accepts_word, check_completions, eval_ltl_on_word};
use trivalent::pks::{PartialKripke, ThreeValue};
use trivalent::product::{intersect, NodeRef};
use trivalent::proof::{check_proof, generate_proof, render_proof, Checked, Premise, Proof, ProofFormat, ProofStep, StepKind};

fn optimistic_proof() -> (trivalent::pks::Kripke, trivalent::automata::Buchi, Proof) {
    let opt = stereo().complement_close().unwrap().optimistic().unwrap();
    let a = a_ref();
    let proof = generate_proof(&intersect(&opt, &a).unwrap(), &psi3()).unwrap();
    (opt, a, proof)
}

#[test]
fn every_replay_assertion_passes() {
    let report = verify_fixture();
    for c in &report.checks {
        assert!(c.passed, "{}: {}", c.name, c.detail);
    }
    assert_eq!(report.checks.len(), 4);
}

#[test]
fn proof_json_round_trips() {
    let (_, _, proof) = optimistic_proof();
    let text = render_proof(&proof, ProofFormat::Json);
    assert_eq!(Proof::from_json(&text).unwrap(), proof);
    assert!(skeleton_matches(&proof).is_ok());
}

#[test]
fn tampered_fail_step_is_rejected() {
    let (opt, a, mut proof) = optimistic_proof();
    let busy = NodeRef { state: "s1".into(), q: "q0".into() };
    proof.steps[0].component = vec![busy.clone()];
    proof.steps[0].premises = vec![Premise::NoSuccessors(busy)];
    let checked = check_proof(&intersect(&opt, &a).unwrap(), &proof).unwrap();
    match checked {
        Checked::Rejected { step: 0, reason } => assert!(reason.to_string().starts_with("node has successors")),
        other => panic!("{other:?}"),
    }
}

#[test]
fn conclusion_without_initial_node_is_rejected() {
    let (opt, a, mut proof) = optimistic_proof();
    let last = proof.steps.len() - 1;
    proof.steps[last].premises.clear();
    let checked = check_proof(&intersect(&opt, &a).unwrap(), &proof).unwrap();
    assert!(
        matches!(&checked, Checked::Rejected { step, reason } if *step == last && reason.to_string().starts_with("initial node undischarged")),
        "{checked:?}"
    );
}

#[test]
fn reordered_steps_are_rejected() {
    let (opt, a, mut proof) = optimistic_proof();
    let successors = proof.steps.iter().position(|s| s.kind == StepKind::Successors).unwrap();
    let moved: ProofStep = proof.steps.remove(successors);
    proof.steps.insert(0, moved);
    let checked = check_proof(&intersect(&opt, &a).unwrap(), &proof).unwrap();
    assert!(matches!(checked, Checked::Rejected { step: 0, .. }), "{checked:?}");
}

#[test]
fn proof_for_another_model_is_a_mismatch() {
    let (_, a, proof) = optimistic_proof();
    let pes = stereo().complement_close().unwrap().pessimistic().unwrap();
    assert!(check_proof(&intersect(&pes, &a).unwrap(), &proof).is_err());
}

#[test]
fn pinned_automaton_is_language_equivalent_to_the_translation() {
    let translated = ltl_to_buchi(&to_nnf(&parse("F(edb & X G(!cert & !fl))").unwrap()));
    let pinned = a_ref();
    let atoms: Vec<String> = ["edb", "cert", "fl"].iter().map(|s| s.to_string()).collect();
    for w in common::all_words(&atoms, 4) {
        assert_eq!(accepts_word(&pinned, &w).unwrap(), accepts_word(&translated, &w).unwrap(), "{w:?}");
    }
}

#[test]
fn pinned_annotations_describe_the_pinned_automaton() {
    let a = a_ref();
    let atoms: Vec<String> = ["edb", "cert", "fl"].iter().map(|s| s.to_string()).collect();
    for q in 0..a.len() {
        let mut doc = a.to_document();
        doc.initial = vec![a.state_id(q).to_string()];
        let from_q = Buchi::from_document(&doc).unwrap();
        for w in common::all_words(&atoms, 3) {
            let accepted = accepts_word(&from_q, &w).unwrap();
            let eta = eval_ltl_on_word(a.eta(q), &w).unwrap();
            assert_eq!(accepted, eta, "eta({}) on {w:?}", a.state_id(q));
            // q's language is included in the set where mu(q) fails
            if accepted {
                assert!(!eval_ltl_on_word(a.mu(q), &w).unwrap());
            }
        }
    }
}

#[test]
fn verdict_is_maybe_with_either_automaton() {
    let v = check_with_automaton(&stereo(), &psi3(), &a_ref()).unwrap();
    assert_eq!(v.value, VerdictValue::Maybe);
    let w = check(&stereo(), &psi3()).unwrap();
    assert_eq!(w.value, VerdictValue::Maybe);
    assert_eq!(w.counterexample.unwrap().approximation, Approximation::Pessimistic);
    assert_eq!(w.proof.unwrap().approximation, Approximation::Optimistic);
}

#[test]
fn flipped_certificate_with_invariant_is_false() {
    let mut m = stereo();
    let s7 = m.states.iter_mut().find(|s| s.id == "s7").unwrap();
    s7.labels.insert("cert".into(), ThreeValue::T);
    let phi = parse("G !cert").unwrap();
    let v = check(&m, &phi).unwrap();
    assert_eq!(v.value, VerdictValue::False);
    assert_eq!(v.counterexample.unwrap().approximation, Approximation::Optimistic);
    let rows = check_completions(&m, &phi, 20).unwrap();
    assert_eq!(rows.len(), 16);
    assert!(rows.iter().all(|r| !r.satisfies));
}

#[test]
fn maybe_although_every_completion_agrees() {
    // three-valued semantics is weaker than thorough semantics: the
    // tautology p | !p is maybe when p is unknown
    let m = PartialKripke::from_json(
        r#"{"atoms":["p"],"states":[{"id":"s","labels":{"p":"U"}}],"initial":["s"],"transitions":[["s","s"]]}"#,
    )
    .unwrap();
    let phi = parse("p | !p").unwrap();
    assert_eq!(check(&m, &phi).unwrap().value, VerdictValue::Maybe);
    assert!(check_completions(&m, &phi, 20).unwrap().iter().all(|r| r.satisfies));
}

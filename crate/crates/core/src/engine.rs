//! Three-valued verdicts from two classical runs.
//!
//! The property is normalized and complement-closed (`!p` becomes `p~`),
//! which makes it monotone in every atom of the closed model. Its negation
//! is translated to a Büchi automaton and intersected with both
//! approximations of the closed model:
//!
//! * pessimistic product empty: every completion satisfies the property;
//! * optimistic product nonempty: every completion violates it;
//! * otherwise the answer is `maybe`.

use std::fmt;
use std::thread;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{ltl_to_buchi, Buchi};
use crate::ltl::{bar, complement_close, is_barred, negate, to_nnf, Formula, LtlError};
use crate::pks::{Kripke, PartialKripke, PksError, Severity, Violation};
use crate::product::{intersect, Lasso, ProductDoc, ProductError};
use crate::proof::{check_proof, generate_proof, Checked, Proof, ProofError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictValue {
    True,
    False,
    Maybe,
}

impl fmt::Display for VerdictValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VerdictValue::True => "true",
            VerdictValue::False => "false",
            VerdictValue::Maybe => "maybe",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Approximation {
    Pessimistic,
    Optimistic,
}

impl fmt::Display for Approximation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approximation::Pessimistic => "pessimistic",
            Approximation::Optimistic => "optimistic",
        })
    }
}

/// A violating run of one approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Counterexample {
    pub approximation: Approximation,
    /// Model states, e.g. `s0, s2, s5, (s7)^ω`.
    pub path: String,
    /// Product nodes, canonicalized the same way.
    pub trace: String,
    pub lasso: Lasso,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofEvidence {
    pub approximation: Approximation,
    pub proof: Proof,
}

/// Outcome of one classical run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSummary {
    pub approximation: Approximation,
    pub empty: bool,
    pub product: ProductDoc,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    pub value: VerdictValue,
    pub property: String,
    pub closed_property: String,
    pub counterexample: Option<Counterexample>,
    pub proof: Option<ProofEvidence>,
    pub runs: Vec<RunSummary>,
}

#[derive(Debug, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] PksError),
    #[error(transparent)]
    Formula(#[from] LtlError),
    #[error("property references atom {0} not declared by the model")]
    UnknownAtom(String),
    #[error(transparent)]
    Product(#[from] ProductError),
    #[error("internal error: {0}")]
    Internal(#[from] ProofError),
    #[error("internal error: {0}")]
    Evidence(String),
}

impl EngineError {
    /// Input problems as opposed to broken internal invariants.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, EngineError::Internal(_) | EngineError::Evidence(_))
    }
}

struct Run {
    approximation: Approximation,
    lasso: Option<Lasso>,
    proof: Option<Proof>,
    product: ProductDoc,
}

fn run(
    approximation: Approximation,
    model: &Kripke,
    automaton: &Buchi,
    property: &Formula,
) -> Result<Run, EngineError> {
    let product = intersect(model, automaton)?;
    let lasso = product.find_accepting_lasso();
    // evidence is re-validated before it leaves the engine
    let proof = match &lasso {
        Some(l) => {
            l.validate(&product).map_err(|d| EngineError::Evidence(format!("invalid lasso: {d}")))?;
            None
        }
        None => {
            let proof = generate_proof(&product, property)?;
            match check_proof(&product, &proof)? {
                Checked::Accepted => Some(proof),
                Checked::Rejected { step, reason } => {
                    return Err(EngineError::Evidence(format!("proof step {step} rejected: {reason}")))
                }
            }
        }
    };
    Ok(Run { approximation, lasso, proof, product: product.to_document() })
}

/// The closed property `close(nnf(phi))`.
pub fn closed_property(phi: &Formula) -> Result<Formula, LtlError> {
    complement_close(&to_nnf(phi))
}

/// Builds the automaton for the negated closed property.
pub fn negated_automaton(phi: &Formula) -> Result<Buchi, LtlError> {
    Ok(ltl_to_buchi(&negate(&closed_property(phi)?)))
}

fn prepare(m: &PartialKripke, phi: &Formula) -> Result<PartialKripke, EngineError> {
    let errors: Vec<Violation> =
        m.validate().into_iter().filter(|v| v.severity() == Severity::Error).collect();
    if !errors.is_empty() {
        return Err(PksError::Invalid(errors).into());
    }
    let closed = if m.is_complement_closed() { m.clone() } else { m.complement_close()? };
    for a in phi.atoms() {
        let known = closed.atoms.contains(&a) || (is_barred(&a) && closed.atoms.contains(&bar(&a)));
        if !known {
            return Err(EngineError::UnknownAtom(a));
        }
    }
    Ok(closed)
}

/// Three-valued check of `phi` on `m` using the automaton for its negated
/// closed form.
pub fn check(m: &PartialKripke, phi: &Formula) -> Result<Verdict, EngineError> {
    prepare(m, phi)?;
    let automaton = negated_automaton(phi)?;
    check_with_automaton(m, phi, &automaton)
}

/// Same as [`check`] with a caller-supplied automaton, which must accept
/// exactly the runs violating `phi` over the closed atoms.
pub fn check_with_automaton(
    m: &PartialKripke,
    phi: &Formula,
    automaton: &Buchi,
) -> Result<Verdict, EngineError> {
    let closed = prepare(m, phi)?;
    let pes = closed.pessimistic()?;
    let opt = closed.optimistic()?;
    let (pes_run, opt_run) = thread::scope(|scope| {
        let handle = scope.spawn(|| run(Approximation::Optimistic, &opt, automaton, phi));
        let pes_run = run(Approximation::Pessimistic, &pes, automaton, phi);
        let opt_run = handle.join().expect("optimistic run does not panic");
        (pes_run, opt_run)
    });
    let (pes_run, opt_run) = (pes_run?, opt_run?);
    Ok(combine(phi, pes_run, opt_run))
}

fn counterexample(run: &Run) -> Option<Counterexample> {
    run.lasso.as_ref().map(|lasso| Counterexample {
        approximation: run.approximation,
        path: lasso.model_path_text(),
        trace: lasso.trace_text(),
        lasso: lasso.clone(),
    })
}

fn proof_evidence(run: &Run) -> Option<ProofEvidence> {
    run.proof
        .as_ref()
        .map(|proof| ProofEvidence { approximation: run.approximation, proof: proof.clone() })
}

fn combine(phi: &Formula, pes: Run, opt: Run) -> Verdict {
    let (value, counterexample, proof) = if pes.lasso.is_none() {
        (VerdictValue::True, None, proof_evidence(&pes))
    } else if opt.lasso.is_some() {
        (VerdictValue::False, counterexample(&opt), None)
    } else {
        (VerdictValue::Maybe, counterexample(&pes), proof_evidence(&opt))
    };
    let closed = closed_property(phi).map(|f| f.to_string()).unwrap_or_default();
    Verdict {
        value,
        property: phi.to_string(),
        closed_property: closed,
        counterexample,
        proof,
        runs: [pes, opt]
            .into_iter()
            .map(|r| RunSummary {
                approximation: r.approximation,
                empty: r.lasso.is_none(),
                product: r.product,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn model(json: &str) -> PartialKripke {
        PartialKripke::from_json(json).unwrap()
    }

    const TWO_STATE: &str = r#"{
        "atoms": ["p", "q"],
        "states": [
            {"id": "s0", "labels": {"p": "T", "q": "F"}},
            {"id": "s1", "labels": {"p": "T", "q": "U"}}
        ],
        "initial": ["s0"],
        "transitions": [["s0", "s1"], ["s1", "s1"]]
    }"#;

    #[test]
    fn definite_true_has_pessimistic_proof() {
        let v = check(&model(TWO_STATE), &parse("G p").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::True);
        assert!(v.counterexample.is_none());
        assert_eq!(v.proof.unwrap().approximation, Approximation::Pessimistic);
    }

    #[test]
    fn definite_false_has_optimistic_lasso() {
        let v = check(&model(TWO_STATE), &parse("F !p").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::False);
        assert!(v.proof.is_none());
        let cex = v.counterexample.unwrap();
        assert_eq!(cex.approximation, Approximation::Optimistic);
        assert_eq!(cex.path, "s0, (s1)^ω");
    }

    #[test]
    fn unknown_gives_maybe_with_both_artifacts() {
        let v = check(&model(TWO_STATE), &parse("F q").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::Maybe);
        assert_eq!(v.counterexample.unwrap().approximation, Approximation::Pessimistic);
        assert_eq!(v.proof.unwrap().approximation, Approximation::Optimistic);
    }

    #[test]
    fn negated_unknown_is_maybe_too() {
        // with plain approximations G !q would come out true on M_pes
        let v = check(&model(TWO_STATE), &parse("G !q").unwrap()).unwrap();
        assert_eq!(v.value, VerdictValue::Maybe);
        assert_eq!(v.closed_property, "G q~");
    }

    #[test]
    fn rejects_unknown_atom_and_invalid_model() {
        let err = check(&model(TWO_STATE), &parse("G r").unwrap()).unwrap_err();
        assert!(matches!(err, EngineError::UnknownAtom(a) if a == "r"));
        let broken = TWO_STATE.replace(r#"["s1", "s1"]"#, r#"["s0", "s0"]"#);
        let err = check(&model(&broken), &parse("G p").unwrap()).unwrap_err();
        assert!(err.to_string().contains("non-total state s1"));
        assert!(err.is_input_error());
    }

    #[test]
    fn true_formula_is_true() {
        let v = check(&model(TWO_STATE), &Formula::True).unwrap();
        assert_eq!(v.value, VerdictValue::True);
        assert!(v.proof.is_some());
    }
}

mod common;

use proptest::prelude::*;

use trivalent::automata::ltl_to_buchi;
use trivalent::engine::{check, closed_property, VerdictValue};
use trivalent::ltl::{complement_close, negate, to_nnf, Formula};
use trivalent::oracle::{accepts_word, eval_ltl_on_word, model_satisfies, UpWord};
use trivalent::pks::{enumerate_completions, ThreeValue};
use trivalent::product::intersect;
use trivalent::proof::{check_proof, generate_proof, Checked, Claim};

fn atoms() -> Vec<String> {
    common::atom_names(2)
}

fn formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        Just(Formula::atom("p")),
        Just(Formula::atom("q")),
    ];
    leaf.prop_recursive(4, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.and(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.or(b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.implies(b)),
            inner.clone().prop_map(Formula::next),
            inner.clone().prop_map(Formula::finally),
            inner.clone().prop_map(Formula::globally),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a.until(b)),
            (inner.clone(), inner).prop_map(|(a, b)| a.release(b)),
        ]
    })
}

fn word() -> impl Strategy<Value = UpWord> {
    let letter = (any::<bool>(), any::<bool>())
        .prop_map(|(p, q)| [("p".to_string(), p), ("q".to_string(), q)].into_iter().collect());
    (prop::collection::vec(letter.clone(), 0..4), prop::collection::vec(letter, 1..4))
        .prop_map(|(prefix, period)| UpWord::new(prefix, period))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn negation_is_an_involution_on_nnf(f in formula()) {
        let n = to_nnf(&f);
        prop_assert!(n.is_nnf());
        prop_assert_eq!(to_nnf(&negate(&negate(&n))), n);
    }

    #[test]
    fn nnf_and_negation_preserve_meaning(f in formula(), w in word()) {
        let v = eval_ltl_on_word(&f, &w).unwrap();
        prop_assert_eq!(eval_ltl_on_word(&to_nnf(&f), &w).unwrap(), v);
        prop_assert_eq!(eval_ltl_on_word(&negate(&f), &w).unwrap(), !v);
    }

    #[test]
    fn closing_preserves_meaning_on_consistent_words(f in formula(), w in word()) {
        let closed = complement_close(&to_nnf(&f)).unwrap();
        prop_assert!(closed.is_nnf());
        prop_assert_eq!(eval_ltl_on_word(&closed, &w).unwrap(), eval_ltl_on_word(&f, &w).unwrap());
        prop_assert_eq!(closed_property(&f).unwrap(), closed);
    }

    #[test]
    fn translation_accepts_exactly_the_models(f in formula(), w in word()) {
        let n = to_nnf(&f);
        let a = ltl_to_buchi(&n);
        prop_assert_eq!(accepts_word(&a, &w).unwrap(), eval_ltl_on_word(&n, &w).unwrap());
    }

    #[test]
    fn proofs_are_deterministic_and_their_claims_hold(f in formula(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::kripke(&mut rng, 4, &atoms());
        let a = ltl_to_buchi(&negate(&f));
        let p = intersect(&m, &a).unwrap();
        prop_assume!(p.find_accepting_lasso().is_none());
        let proof = generate_proof(&p, &f).unwrap();
        prop_assert_eq!(&generate_proof(&p, &f).unwrap(), &proof);
        prop_assert_eq!(check_proof(&p, &proof).unwrap(), Checked::Accepted);
        prop_assert!(model_satisfies(&m, &f).unwrap());
        for step in &proof.steps {
            for claim in &step.conclusions {
                if let Claim::Holds { state, q, .. } = claim {
                    let s = m.state_index(state).unwrap();
                    let mu = a.mu(a.state_index(q).unwrap());
                    prop_assert!(
                        model_satisfies(&common::rooted_at(&m, s), mu).unwrap(),
                        "{} does not satisfy mu({}) = {}", state, q, mu
                    );
                }
            }
        }
    }

    #[test]
    fn lassos_witness_violations(f in formula(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::kripke(&mut rng, 4, &atoms());
        let a = ltl_to_buchi(&negate(&f));
        let p = intersect(&m, &a).unwrap();
        match p.find_accepting_lasso() {
            Some(lasso) => {
                prop_assert!(lasso.validate(&p).is_ok());
                prop_assert!(!model_satisfies(&m, &f).unwrap());
            }
            None => prop_assert!(model_satisfies(&m, &f).unwrap()),
        }
    }

    #[test]
    fn definite_verdicts_agree_with_every_completion(f in formula(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::pks(&mut rng, 4, &atoms(), 3);
        let verdict = check(&m, &f).unwrap();
        let expect = match verdict.value {
            VerdictValue::True => true,
            VerdictValue::False => false,
            VerdictValue::Maybe => return Ok(()),
        };
        for c in enumerate_completions(&m, 20).unwrap() {
            prop_assert_eq!(model_satisfies(&c, &f).unwrap(), expect);
        }
    }

    #[test]
    fn refining_an_unknown_keeps_definite_verdicts(f in formula(), seed in any::<u64>(), to_true in any::<bool>()) {
        let mut rng = common::rng(seed);
        let m = common::pks(&mut rng, 4, &atoms(), 3);
        let before = check(&m, &f).unwrap().value;
        let mut refined = m.clone();
        let Some(cell) = refined
            .states
            .iter_mut()
            .flat_map(|s| s.labels.values_mut())
            .find(|v| **v == ThreeValue::U)
        else {
            return Ok(());
        };
        *cell = if to_true { ThreeValue::T } else { ThreeValue::F };
        let after = check(&refined, &f).unwrap().value;
        if before != VerdictValue::Maybe {
            prop_assert_eq!(after, before);
        }
    }

    #[test]
    fn verdicts_are_deterministic(f in formula(), seed in any::<u64>()) {
        let mut rng = common::rng(seed);
        let m = common::pks(&mut rng, 4, &atoms(), 2);
        let a = check(&m, &f).unwrap();
        let b = check(&m, &f).unwrap();
        prop_assert_eq!(a.value, b.value);
        prop_assert_eq!(format!("{:?}", a.counterexample), format!("{:?}", b.counterexample));
        prop_assert_eq!(format!("{:?}", a.proof), format!("{:?}", b.proof));
    }
}

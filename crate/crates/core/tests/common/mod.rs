//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trivalent::ltl::{to_nnf, Formula};
use trivalent::oracle::{Letter, UpWord};
use trivalent::pks::{Kripke, PartialKripke, StateDecl, ThreeValue};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn atom_names(k: usize) -> Vec<String> {
    ["p", "q", "r"][..k].iter().map(|s| s.to_string()).collect()
}

/// Any formula over `atoms` of depth at most `depth`, surface operators
/// included.
pub fn formula(rng: &mut ChaCha8Rng, atoms: &[String], depth: usize) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        let a = atoms.choose(rng).expect("at least one atom").clone();
        return match rng.gen_range(0..10) {
            0 => Formula::True,
            1 => Formula::False,
            2 | 3 => Formula::Atom(a).not(),
            _ => Formula::Atom(a),
        };
    }
    let d = depth - 1;
    match rng.gen_range(0..10) {
        0 => formula(rng, atoms, d).not(),
        1 => formula(rng, atoms, d).and(formula(rng, atoms, d)),
        2 => formula(rng, atoms, d).or(formula(rng, atoms, d)),
        3 => formula(rng, atoms, d).implies(formula(rng, atoms, d)),
        4 => formula(rng, atoms, d).next(),
        5 => formula(rng, atoms, d).finally(),
        6 => formula(rng, atoms, d).globally(),
        7 => formula(rng, atoms, d).until(formula(rng, atoms, d)),
        8 => formula(rng, atoms, d).release(formula(rng, atoms, d)),
        _ => formula(rng, atoms, d).and(formula(rng, atoms, d).next()),
    }
}

pub fn nnf_formula(rng: &mut ChaCha8Rng, atoms: &[String], depth: usize) -> Formula {
    to_nnf(&formula(rng, atoms, depth))
}

/// A total partial structure with at most `max_unknowns` unknown labels.
pub fn pks(rng: &mut ChaCha8Rng, max_states: usize, atoms: &[String], max_unknowns: usize) -> PartialKripke {
    let n = rng.gen_range(1..=max_states);
    let ids: Vec<String> = (0..n).map(|i| format!("s{i}")).collect();
    let unknowns = rng.gen_range(0..=max_unknowns);
    let mut cells: Vec<(usize, usize)> =
        (0..n).flat_map(|s| (0..atoms.len()).map(move |a| (s, a))).collect();
    cells.shuffle(rng);
    let unknown: BTreeSet<(usize, usize)> = cells.into_iter().take(unknowns).collect();
    let states = (0..n)
        .map(|s| {
            let labels: BTreeMap<String, ThreeValue> = atoms
                .iter()
                .enumerate()
                .map(|(a, name)| {
                    let v = if unknown.contains(&(s, a)) {
                        ThreeValue::U
                    } else if rng.gen_bool(0.5) {
                        ThreeValue::T
                    } else {
                        ThreeValue::F
                    };
                    (name.clone(), v)
                })
                .collect();
            StateDecl { id: ids[s].clone(), labels }
        })
        .collect();
    PartialKripke {
        atoms: atoms.to_vec(),
        states,
        initial: vec![ids[0].clone()],
        transitions: edges(rng, n).into_iter().map(|(a, b)| (ids[a].clone(), ids[b].clone())).collect(),
    }
}

/// Total random edge relation, one to three successors per state.
pub fn edges(rng: &mut ChaCha8Rng, n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for s in 0..n {
        let k = rng.gen_range(1..=3.min(n));
        let mut targets: Vec<usize> = (0..n).collect();
        targets.shuffle(rng);
        out.extend(targets.into_iter().take(k).map(|t| (s, t)));
    }
    out
}

pub fn kripke(rng: &mut ChaCha8Rng, max_states: usize, atoms: &[String]) -> Kripke {
    let n = rng.gen_range(1..=max_states);
    let mut succ = vec![Vec::new(); n];
    for (a, b) in edges(rng, n) {
        succ[a].push(b);
    }
    let labels = (0..n)
        .map(|_| atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect())
        .collect();
    Kripke::new(atoms.to_vec(), (0..n).map(|i| format!("s{i}")).collect(), vec![0], succ, labels)
        .expect("generated structure is well formed")
}

/// Every letter over `atoms`.
pub fn letters(atoms: &[String]) -> Vec<Letter> {
    (0..1u32 << atoms.len())
        .map(|bits| atoms.iter().enumerate().map(|(i, a)| (a.clone(), bits >> i & 1 == 1)).collect())
        .collect()
}

/// Every ultimately periodic word with `prefix + period <= max_len`.
pub fn all_words(atoms: &[String], max_len: usize) -> Vec<UpWord> {
    let alphabet = letters(atoms);
    let mut out = Vec::new();
    for len in 1..=max_len {
        for seq in sequences(&alphabet, len) {
            for cut in 0..len {
                out.push(UpWord::new(seq[..cut].to_vec(), seq[cut..].to_vec()));
            }
        }
    }
    out
}

fn sequences(alphabet: &[Letter], len: usize) -> Vec<Vec<Letter>> {
    let mut out: Vec<Vec<Letter>> = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|seq| {
                alphabet.iter().map(move |l| {
                    let mut s = seq.clone();
                    s.push(l.clone());
                    s
                })
            })
            .collect();
    }
    out
}

/// `m` with its initial states replaced by `s`.
pub fn rooted_at(m: &Kripke, s: usize) -> Kripke {
    let labels = (0..m.len())
        .map(|i| m.atoms().iter().filter(|a| m.label(i, a) == Some(true)).cloned().collect())
        .collect();
    Kripke::new(
        m.atoms().to_vec(),
        (0..m.len()).map(|i| m.state_id(i).to_string()).collect(),
        vec![s],
        (0..m.len()).map(|i| m.successors(i).to_vec()).collect(),
        labels,
    )
    .expect("same structure")
}

//! Tableau translation from NNF LTL to state-based Büchi automata.
//!
//! A tableau state is a set of obligations that must hold at the current
//! position. Expanding the set yields covers: a consistent set of literals
//! for the current letter plus the obligations deferred to the next
//! position. Each until/finally subterm contributes a generalized
//! acceptance condition on transitions ("not postponed"), which is then
//! degeneralized with a level counter.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::ltl::{to_nnf, Formula};

use super::{Buchi, Edge, Guard};

type Obligations = BTreeSet<Formula>;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Cover {
    // (atom, polarity), sorted
    literals: BTreeSet<(String, bool)>,
    next: Obligations,
    // eventualities fulfilled (not postponed) on this step
    fulfilled: BTreeSet<Formula>,
}

struct Branch {
    todo: Vec<Formula>,
    done: BTreeSet<Formula>,
    cover: Cover,
}

fn expand(obligations: &Obligations) -> Vec<Cover> {
    let mut out = BTreeSet::new();
    let start = Branch {
        todo: obligations.iter().rev().cloned().collect(),
        done: BTreeSet::new(),
        cover: Cover {
            literals: BTreeSet::new(),
            next: BTreeSet::new(),
            fulfilled: BTreeSet::new(),
        },
    };
    let mut stack = vec![start];
    'branches: while let Some(mut b) = stack.pop() {
        while let Some(f) = b.todo.pop() {
            if !b.done.insert(f.clone()) {
                continue;
            }
            use Formula::*;
            match &f {
                True => {}
                False => continue 'branches,
                Atom(p) | NegAtom(p) => {
                    let positive = matches!(f, Atom(_));
                    if b.cover.literals.contains(&(p.clone(), !positive)) {
                        continue 'branches;
                    }
                    b.cover.literals.insert((p.clone(), positive));
                }
                And(l, r) => {
                    b.todo.push((**r).clone());
                    b.todo.push((**l).clone());
                }
                Or(l, r) => {
                    let mut alt = Branch {
                        todo: b.todo.clone(),
                        done: b.done.clone(),
                        cover: b.cover.clone(),
                    };
                    alt.todo.push((**r).clone());
                    stack.push(alt);
                    b.todo.push((**l).clone());
                }
                Next(g) => {
                    b.cover.next.insert((**g).clone());
                }
                Until(l, r) => {
                    let mut postpone = Branch {
                        todo: b.todo.clone(),
                        done: b.done.clone(),
                        cover: b.cover.clone(),
                    };
                    postpone.todo.push((**l).clone());
                    postpone.cover.next.insert(f.clone());
                    stack.push(postpone);
                    b.cover.fulfilled.insert(f.clone());
                    b.todo.push((**r).clone());
                }
                Finally(g) => {
                    let mut postpone = Branch {
                        todo: b.todo.clone(),
                        done: b.done.clone(),
                        cover: b.cover.clone(),
                    };
                    postpone.cover.next.insert(f.clone());
                    stack.push(postpone);
                    b.cover.fulfilled.insert(f.clone());
                    b.todo.push((**g).clone());
                }
                Release(l, r) => {
                    let mut postpone = Branch {
                        todo: b.todo.clone(),
                        done: b.done.clone(),
                        cover: b.cover.clone(),
                    };
                    postpone.todo.push((**r).clone());
                    postpone.cover.next.insert(f.clone());
                    stack.push(postpone);
                    b.todo.push((**r).clone());
                    b.todo.push((**l).clone());
                }
                Globally(g) => {
                    b.cover.next.insert(f.clone());
                    b.todo.push((**g).clone());
                }
                Not(_) | Implies(_, _) => unreachable!("input normalized to NNF"),
            }
        }
        out.insert(b.cover);
    }
    out.into_iter().collect()
}

/// Eventualities in pre-order of first occurrence; fixes the order in which
/// fairness sets are degeneralized.
fn eventualities(f: &Formula) -> Vec<Formula> {
    f.subformulas()
        .into_iter()
        .filter(|g| matches!(g, Formula::Until(..) | Formula::Finally(..)))
        .cloned()
        .collect()
}

fn accepts(cover: &Cover, ev: &Formula) -> bool {
    !cover.next.contains(ev) || cover.fulfilled.contains(ev)
}

/// Translates `phi` (normalized to NNF first) into a Büchi automaton whose
/// language is the set of words satisfying `phi`.
///
/// States are named `q0, q1, …` in breadth-first discovery order; `q0` is
/// the unique initial state and `eta(q0) = phi`.
pub fn ltl_to_buchi(phi: &Formula) -> Buchi {
    let phi = to_nnf(phi);
    let events = eventualities(&phi);
    let k = events.len();

    // Degeneralized state: (obligations, level) with level in 0..=k;
    // level k is accepting and behaves as level 0 when leaving.
    type Key = (Obligations, usize);
    let start: Key = (BTreeSet::from([phi.clone()]), 0);

    let mut ids: HashMap<Key, usize> = HashMap::new();
    let mut keys: Vec<Key> = Vec::new();
    let mut queue = VecDeque::new();
    let mut covers_of: HashMap<Obligations, Vec<Cover>> = HashMap::new();
    let mut edges = Vec::new();

    ids.insert(start.clone(), 0);
    keys.push(start.clone());
    queue.push_back(start);

    while let Some(key) = queue.pop_front() {
        let from = ids[&key];
        let (obligations, level) = key;
        let covers = covers_of
            .entry(obligations.clone())
            .or_insert_with(|| expand(&obligations))
            .clone();
        let base = if level == k { 0 } else { level };
        let mut seen = BTreeSet::new();
        for cover in covers {
            let mut next_level = base;
            while next_level < k && accepts(&cover, &events[next_level]) {
                next_level += 1;
            }
            let target: Key = (cover.next.clone(), next_level);
            let literals: Vec<(String, bool)> = cover.literals.iter().cloned().collect();
            let guard = Guard::conjunction(&literals);
            let to = match ids.get(&target) {
                Some(&id) => id,
                None => {
                    let id = keys.len();
                    ids.insert(target.clone(), id);
                    keys.push(target.clone());
                    queue.push_back(target);
                    id
                }
            };
            if seen.insert((guard.clone(), to)) {
                edges.push(Edge { from, guard, to });
            }
        }
    }

    let states = (0..keys.len()).map(|i| format!("q{i}")).collect();
    let accepting = keys
        .iter()
        .enumerate()
        .filter(|(_, (_, level))| *level == k)
        .map(|(i, _)| i)
        .collect();
    let eta = keys
        .iter()
        .map(|(obligations, _)| Formula::conjunction(obligations.iter().cloned()))
        .collect();
    Buchi::new(states, vec![0], accepting, edges, eta)
}

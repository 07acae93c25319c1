//! Naive reference implementations used to test the main pipeline.
//!
//! Nothing here touches the tableau, the product or the nested search, so
//! agreement between the two paths is meaningful. Everything is exponential
//! somewhere and capped accordingly.

use std::collections::{BTreeMap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::{AutomatonError, Buchi};
use crate::ltl::{is_barred, Formula, COMPLEMENT_MARKER};
use crate::pks::{enumerate_completions, Kripke, PartialKripke, PksError};
use crate::product::Product;

/// Temporal subformulas beyond this make the valuation graph too large.
pub const MAX_TEMPORAL: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("atom {0} is not assigned by the word")]
    UnassignedAtom(String),
    #[error("formula has {0} temporal subformulas; the oracle handles at most {MAX_TEMPORAL}")]
    TooLarge(usize),
    #[error(transparent)]
    Model(#[from] PksError),
}

pub type Letter = BTreeMap<String, bool>;

/// `prefix · period^ω`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpWord {
    pub prefix: Vec<Letter>,
    pub period: Vec<Letter>,
}

impl UpWord {
    pub fn new(prefix: Vec<Letter>, period: Vec<Letter>) -> Self {
        assert!(!period.is_empty(), "period must be nonempty");
        UpWord { prefix, period }
    }

    fn positions(&self) -> usize {
        self.prefix.len() + self.period.len()
    }

    fn letter(&self, i: usize) -> &Letter {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.period[i - self.prefix.len()]
        }
    }

    fn next(&self, i: usize) -> usize {
        if i + 1 < self.positions() {
            i + 1
        } else {
            self.prefix.len()
        }
    }
}

/// Value of an atom in a letter; a barred atom missing from the letter is
/// read as the negation of its partner.
fn lookup(letter: &Letter, atom: &str) -> Result<bool, OracleError> {
    if let Some(&v) = letter.get(atom) {
        return Ok(v);
    }
    if is_barred(atom) {
        if let Some(&v) = letter.get(atom.trim_end_matches(COMPLEMENT_MARKER)) {
            return Ok(!v);
        }
    }
    Err(OracleError::UnassignedAtom(atom.to_string()))
}

/// Truth of `phi` at every position of `w`'s lasso, by fixpoint iteration.
fn eval_positions(phi: &Formula, w: &UpWord) -> Result<Vec<bool>, OracleError> {
    use Formula::*;
    let n = w.positions();
    let until = |l: &[bool], r: &[bool]| {
        let mut v = vec![false; n];
        for _ in 0..=n {
            for i in (0..n).rev() {
                v[i] = r[i] || (l[i] && v[w.next(i)]);
            }
        }
        v
    };
    let release = |l: &[bool], r: &[bool]| {
        let mut v = vec![true; n];
        for _ in 0..=n {
            for i in (0..n).rev() {
                v[i] = r[i] && (l[i] || v[w.next(i)]);
            }
        }
        v
    };
    Ok(match phi {
        True => vec![true; n],
        False => vec![false; n],
        Atom(p) => (0..n).map(|i| lookup(w.letter(i), p)).collect::<Result<_, _>>()?,
        NegAtom(p) => (0..n).map(|i| lookup(w.letter(i), p).map(|v| !v)).collect::<Result<_, _>>()?,
        Not(g) => eval_positions(g, w)?.into_iter().map(|v| !v).collect(),
        And(a, b) => zip(eval_positions(a, w)?, eval_positions(b, w)?, |x, y| x && y),
        Or(a, b) => zip(eval_positions(a, w)?, eval_positions(b, w)?, |x, y| x || y),
        Implies(a, b) => zip(eval_positions(a, w)?, eval_positions(b, w)?, |x, y| !x || y),
        Next(g) => {
            let v = eval_positions(g, w)?;
            (0..n).map(|i| v[w.next(i)]).collect()
        }
        Finally(g) => until(&vec![true; n], &eval_positions(g, w)?),
        Globally(g) => release(&vec![false; n], &eval_positions(g, w)?),
        Until(a, b) => until(&eval_positions(a, w)?, &eval_positions(b, w)?),
        Release(a, b) => release(&eval_positions(a, w)?, &eval_positions(b, w)?),
    })
}

fn zip(a: Vec<bool>, b: Vec<bool>, f: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| f(x, y)).collect()
}

/// Whether `w` satisfies `phi`.
pub fn eval_ltl_on_word(phi: &Formula, w: &UpWord) -> Result<bool, OracleError> {
    Ok(eval_positions(phi, w)?[0])
}

/// Whether `a` accepts `w`, by searching the finite graph of
/// (automaton state, word position) for a reachable accepting cycle.
pub fn accepts_word(a: &Buchi, w: &UpWord) -> Result<bool, OracleError> {
    let n = w.positions();
    let id = |q: usize, i: usize| q * n + i;
    let mut succ = vec![Vec::new(); a.len() * n];
    for e in a.edges() {
        for i in 0..n {
            let letter = w.letter(i);
            let ok = e
                .guard
                .eval(&|atom: &str| lookup(letter, atom).ok())
                .map_err(|err| match err {
                    AutomatonError::UnassignedAtom(a) => OracleError::UnassignedAtom(a),
                    other => OracleError::UnassignedAtom(other.to_string()),
                })?;
            if ok {
                succ[id(e.from, i)].push(id(e.to, w.next(i)));
            }
        }
    }
    let starts: Vec<usize> = a.initial().iter().map(|&q| id(q, 0)).collect();
    let reachable = reach(&succ, &starts);
    Ok((0..a.len() * n).any(|v| {
        reachable[v] && a.is_accepting(v / n) && reach(&succ, &succ[v])[v]
    }))
}

fn reach(succ: &[Vec<usize>], from: &[usize]) -> Vec<bool> {
    let mut seen = vec![false; succ.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for &v in from {
        if !seen[v] {
            seen[v] = true;
            queue.push_back(v);
        }
    }
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    seen
}

/// Nonemptiness of a product by direct search: some reachable accepting
/// node lies on a cycle.
pub fn brute_force_nonempty(p: &Product) -> bool {
    let succ: Vec<Vec<usize>> = (0..p.len()).map(|v| p.successors(v).to_vec()).collect();
    let reachable = reach(&succ, p.initial());
    (0..p.len()).any(|v| reachable[v] && p.is_accepting(v) && reach(&succ, &succ[v])[v])
}

/// The word read along a lasso of model states.
pub fn lasso_word(m: &Kripke, prefix: &[usize], cycle: &[usize]) -> UpWord {
    let letters = |v: &[usize]| v.iter().map(|&s| m.letter(s)).collect();
    UpWord::new(letters(prefix), letters(cycle))
}

/// Every lasso from an initial state with at most `max_len` distinct
/// positions: a simple-or-not path `s0 … sk` plus a back edge `sk -> sj`.
pub fn enumerate_lassos(m: &Kripke, max_len: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = m.initial().iter().map(|&s| vec![s]).collect();
    while let Some(path) = stack.pop() {
        let last = *path.last().expect("paths are nonempty");
        for &t in m.successors(last) {
            for (j, &s) in path.iter().enumerate() {
                if s == t {
                    out.push((path[..j].to_vec(), path[j..].to_vec()));
                }
            }
            if path.len() < max_len {
                let mut longer = path.clone();
                longer.push(t);
                stack.push(longer);
            }
        }
    }
    out
}

/// Bounded check: every enumerated lasso satisfies `phi`. Complete only
/// when `max_len` is large enough for the instance.
pub fn lassos_satisfy(m: &Kripke, phi: &Formula, max_len: usize) -> Result<bool, OracleError> {
    for (prefix, cycle) in enumerate_lassos(m, max_len) {
        if !eval_ltl_on_word(phi, &lasso_word(m, &prefix, &cycle))? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact check that every path of `m` satisfies `phi`.
///
/// Searches for a path satisfying `!phi` in the graph of pairs (state,
/// valuation of the temporal subformulas). Edges enforce the one-step
/// expansion laws; a path is fair when every until/finally assumed true is
/// eventually fulfilled and every release/globally assumed false is
/// eventually refuted. Fair paths carry exactly their true valuations.
pub fn model_satisfies(m: &Kripke, phi: &Formula) -> Result<bool, OracleError> {
    let psi = Formula::Not(Box::new(phi.clone()));
    let temporal: Vec<&Formula> = psi
        .subformulas()
        .into_iter()
        .filter(|f| {
            matches!(
                f,
                Formula::Next(_)
                    | Formula::Finally(_)
                    | Formula::Globally(_)
                    | Formula::Until(..)
                    | Formula::Release(..)
            )
        })
        .collect();
    let k = temporal.len();
    if k > MAX_TEMPORAL {
        return Err(OracleError::TooLarge(k));
    }
    for a in psi.atoms() {
        if m.atom_index(&a).is_none() && !(is_barred(&a) && m.atom_index(a.trim_end_matches(COMPLEMENT_MARKER)).is_some()) {
            return Err(OracleError::UnassignedAtom(a));
        }
    }
    let bit: HashMap<&Formula, usize> = temporal.iter().enumerate().map(|(i, f)| (*f, i)).collect();
    let vals = 1usize << k;
    let letters: Vec<Letter> = (0..m.len()).map(|s| m.letter(s)).collect();
    let eval = |f: &Formula, s: usize, alpha: usize| -> bool { holds(f, &letters[s], alpha, &bit) };

    let node = |s: usize, alpha: usize| s * vals + alpha;
    let total = m.len() * vals;
    // X subformulas constrain the successor's valuation through their
    // argument; the others through their own bit at the successor.
    let x_mask: usize = temporal
        .iter()
        .enumerate()
        .filter(|(_, f)| matches!(f, Formula::Next(_)))
        .fold(0, |acc, (i, _)| acc | 1 << i);
    let x_value: Vec<usize> = (0..total)
        .map(|v| {
            temporal.iter().enumerate().fold(0, |acc, (i, f)| match f {
                Formula::Next(g) if eval(g, v / vals, v % vals) => acc | 1 << i,
                _ => acc,
            })
        })
        .collect();
    // for every node: (care, required) bits of the successor valuation,
    // or None when the node contradicts itself
    let needs: Vec<Option<(usize, usize)>> = (0..total)
        .map(|v| {
            let (s, alpha) = (v / vals, v % vals);
            let (mut care, mut required) = (0usize, 0usize);
            for (i, f) in temporal.iter().enumerate() {
                let now = alpha >> i & 1 == 1;
                let step = |later: bool| match f {
                    Formula::Finally(g) => eval(g, s, alpha) || later,
                    Formula::Globally(g) => eval(g, s, alpha) && later,
                    Formula::Until(a, b) => eval(b, s, alpha) || (eval(a, s, alpha) && later),
                    Formula::Release(a, b) => eval(b, s, alpha) && (eval(a, s, alpha) || later),
                    _ => now,
                };
                match (step(false) == now, step(true) == now) {
                    (true, true) => {}
                    (false, false) => return None,
                    (false, true) => {
                        care |= 1 << i;
                        required |= 1 << i;
                    }
                    (true, false) => care |= 1 << i,
                }
            }
            Some((care, required))
        })
        .collect();
    let mut succ = vec![Vec::new(); total];
    for s in 0..m.len() {
        for alpha in 0..vals {
            let Some((care, required)) = needs[node(s, alpha)] else { continue };
            for &t in m.successors(s) {
                for beta in 0..vals {
                    let w = node(t, beta);
                    if beta & care == required && (x_value[w] & x_mask) == (alpha & x_mask) {
                        succ[node(s, alpha)].push(w);
                    }
                }
            }
        }
    }

    // one fairness set per eventuality and per refutable invariant
    let fair_sets: Vec<Vec<bool>> = temporal
        .iter()
        .enumerate()
        .filter_map(|(i, f)| {
            let set = |pred: &dyn Fn(usize, usize) -> bool| {
                (0..total).map(|v| pred(v / vals, v % vals)).collect::<Vec<bool>>()
            };
            let on = move |alpha: usize| alpha >> i & 1 == 1;
            match f {
                Formula::Finally(g) => Some(set(&|s, a| !on(a) || eval(g, s, a))),
                Formula::Until(_, b) => Some(set(&|s, a| !on(a) || eval(b, s, a))),
                Formula::Globally(g) => Some(set(&|s, a| on(a) || !eval(g, s, a))),
                Formula::Release(_, b) => Some(set(&|s, a| on(a) || !eval(b, s, a))),
                _ => None,
            }
        })
        .collect();

    let starts: Vec<usize> = m
        .initial()
        .iter()
        .flat_map(|&s| (0..vals).map(move |a| (s, a)))
        .filter(|&(s, a)| eval(&psi, s, a))
        .map(|(s, a)| node(s, a))
        .collect();
    let reachable = reach(&succ, &starts);
    let comp = kosaraju(&succ);
    let mut members: HashMap<usize, Vec<usize>> = HashMap::new();
    for v in (0..total).filter(|&v| reachable[v]) {
        members.entry(comp[v]).or_default().push(v);
    }
    let violated = members.values().any(|nodes| {
        let cyclic = nodes.iter().any(|&v| succ[v].iter().any(|&w| comp[w] == comp[v]));
        cyclic && fair_sets.iter().all(|set| nodes.iter().any(|&v| set[v]))
    });
    Ok(!violated)
}

fn holds(f: &Formula, letter: &Letter, alpha: usize, bit: &HashMap<&Formula, usize>) -> bool {
    use Formula::*;
    match f {
        True => true,
        False => false,
        Atom(p) => lookup(letter, p).expect("atoms checked"),
        NegAtom(p) => !lookup(letter, p).expect("atoms checked"),
        Not(g) => !holds(g, letter, alpha, bit),
        And(a, b) => holds(a, letter, alpha, bit) && holds(b, letter, alpha, bit),
        Or(a, b) => holds(a, letter, alpha, bit) || holds(b, letter, alpha, bit),
        Implies(a, b) => !holds(a, letter, alpha, bit) || holds(b, letter, alpha, bit),
        _ => alpha >> bit[f] & 1 == 1,
    }
}

/// Component id per node (Kosaraju, iterative).
fn kosaraju(succ: &[Vec<usize>]) -> Vec<usize> {
    let n = succ.len();
    let mut pred = vec![Vec::new(); n];
    for (v, ws) in succ.iter().enumerate() {
        for &w in ws {
            pred[w].push(v);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut visited = vec![false; n];
    for root in 0..n {
        if visited[root] {
            continue;
        }
        visited[root] = true;
        let mut stack = vec![(root, 0usize)];
        while let Some((v, i)) = stack.pop() {
            if i < succ[v].len() {
                stack.push((v, i + 1));
                let w = succ[v][i];
                if !visited[w] {
                    visited[w] = true;
                    stack.push((w, 0));
                }
            } else {
                order.push(v);
            }
        }
    }
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for &root in order.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = next;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for &w in &pred[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    stack.push(w);
                }
            }
        }
        next += 1;
    }
    comp
}

/// One completion and its classical outcome.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompletionRow {
    /// `state.atom = T|F` for each unknown, in enumeration order.
    pub assignment: Vec<String>,
    pub satisfies: bool,
}

/// Checks `phi` on every completion of `m` (at most `cap` unknowns).
pub fn check_completions(
    m: &PartialKripke,
    phi: &Formula,
    cap: usize,
) -> Result<Vec<CompletionRow>, OracleError> {
    let unknowns = m.unknowns();
    let mut rows = Vec::new();
    for completion in enumerate_completions(m, cap)? {
        let assignment = unknowns
            .iter()
            .map(|(s, a)| {
                let idx = completion.state_index(s).expect("state of the model");
                let v = completion.label(idx, a).expect("atom of the model");
                format!("{s}.{a} = {}", if v { "T" } else { "F" })
            })
            .collect();
        rows.push(CompletionRow { assignment, satisfies: model_satisfies(&completion, phi)? });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse;

    fn letter(pairs: &[(&str, bool)]) -> Letter {
        pairs.iter().map(|(a, v)| (a.to_string(), *v)).collect()
    }

    fn f(s: &str) -> Formula {
        parse(s).unwrap()
    }

    #[test]
    fn word_basics() {
        let p = letter(&[("p", true)]);
        let np = letter(&[("p", false)]);
        let w = UpWord::new(vec![np.clone(), np.clone()], vec![p.clone(), np.clone()]);
        assert!(eval_ltl_on_word(&f("G true"), &w).unwrap());
        assert!(eval_ltl_on_word(&f("G F p"), &w).unwrap());
        assert!(!eval_ltl_on_word(&f("F G p"), &w).unwrap());
        assert!(eval_ltl_on_word(&f("X X p"), &w).unwrap());
        assert!(!eval_ltl_on_word(&f("!p U (p & X p)"), &w).unwrap());
        let never = UpWord::new(vec![], vec![np]);
        assert!(!eval_ltl_on_word(&f("F p"), &never).unwrap());
        assert!(eval_ltl_on_word(&f("p R !p"), &never).unwrap());
        assert!(eval_ltl_on_word(&f("G p~"), &never).unwrap());
        assert_eq!(
            eval_ltl_on_word(&f("F q"), &never),
            Err(OracleError::UnassignedAtom("q".into()))
        );
    }

    fn kripke(n: usize, edges: &[(usize, usize)], truths: &[&[&str]]) -> Kripke {
        let mut succ = vec![Vec::new(); n];
        for &(a, b) in edges {
            succ[a].push(b);
        }
        Kripke::new(
            vec!["p".into(), "q".into()],
            (0..n).map(|i| format!("s{i}")).collect(),
            vec![0],
            succ,
            truths.iter().map(|t| t.iter().map(|s| s.to_string()).collect()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn model_satisfies_small_cases() {
        // s0 -> s1 | s2, s1 loops with p, s2 loops without
        let m = kripke(3, &[(0, 1), (0, 2), (1, 1), (2, 2)], &[&[], &["p"], &["q"]]);
        assert!(model_satisfies(&m, &Formula::True).unwrap());
        assert!(!model_satisfies(&m, &f("F p")).unwrap());
        assert!(model_satisfies(&m, &f("X (p | q)")).unwrap());
        assert!(model_satisfies(&m, &f("F G p | G F q")).unwrap());
        assert!(model_satisfies(&m, &f("G (p -> G p)")).unwrap());
        assert!(!model_satisfies(&m, &f("G !q")).unwrap());
        assert!(model_satisfies(&m, &f("!p U (p | q)")).unwrap());
        assert!(!model_satisfies(&m, &f("q R !p")).unwrap());
    }

    #[test]
    fn hintikka_agrees_with_lasso_enumeration() {
        let m = kripke(
            4,
            &[(0, 1), (0, 2), (1, 3), (2, 0), (3, 3), (3, 1)],
            &[&["p"], &["q"], &["p", "q"], &[]],
        );
        for s in [
            "G F p", "F G !q", "p U q", "G (p -> X q)", "(p R q) | F (q & X !q)", "X X X p",
            "G (q -> F p)", "F (p & X (q U !p))",
        ] {
            let phi = f(s);
            assert_eq!(
                model_satisfies(&m, &phi).unwrap(),
                lassos_satisfy(&m, &phi, 8).unwrap(),
                "{s}"
            );
        }
    }

    #[test]
    fn automaton_membership_matches_words() {
        let phi = crate::ltl::to_nnf(&f("p U (q & X !p)"));
        let a = crate::automata::ltl_to_buchi(&phi);
        let all = [(false, false), (false, true), (true, false), (true, true)];
        for &(p0, q0) in &all {
            for &(p1, q1) in &all {
                let w = UpWord::new(
                    vec![letter(&[("p", p0), ("q", q0)])],
                    vec![letter(&[("p", p1), ("q", q1)])],
                );
                assert_eq!(accepts_word(&a, &w).unwrap(), eval_ltl_on_word(&phi, &w).unwrap());
            }
        }
    }

    #[test]
    fn completion_rows_cover_every_assignment() {
        let m = PartialKripke::from_json(
            r#"{"atoms":["p"],"states":[{"id":"a","labels":{"p":"U"}},{"id":"b","labels":{"p":"U"}}],
                "initial":["a"],"transitions":[["a","b"],["b","b"]]}"#,
        )
        .unwrap();
        let rows = check_completions(&m, &f("F p"), 20).unwrap();
        assert_eq!(rows.len(), 4);
        assert_eq!(rows[0].assignment, vec!["a.p = F", "b.p = F"]);
        assert!(!rows[0].satisfies);
        assert!(rows[1..].iter().all(|r| r.satisfies));
        assert!(matches!(check_completions(&m, &f("F p"), 1), Err(OracleError::Model(_))));
    }
}

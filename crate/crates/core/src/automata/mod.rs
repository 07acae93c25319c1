//! Büchi automata with guarded transitions and per-state formula
//! annotations.
//!
//! A transition `q --g--> q'` fires on a letter that satisfies `g`; in a
//! product with a Kripke structure the letter is the label of the *source*
//! model state. `eta(q)` characterizes the words accepted from `q` and
//! `mu(q)` is its normalized negation.

mod tableau;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::{self, to_nnf, Formula};

pub use tableau::ltl_to_buchi;

/// Propositional guard over atoms (possibly barred).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Guard {
    True,
    Atom(String),
    Not(String),
    And(Box<Guard>, Box<Guard>),
    Or(Box<Guard>, Box<Guard>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("atom {0} is not assigned in the label")]
    UnassignedAtom(String),
    #[error("'{0}' is not a propositional guard")]
    NotAGuard(String),
    #[error("cannot parse formula '{text}': {source}")]
    Parse {
        text: String,
        #[source]
        source: ltl::ParseError,
    },
    #[error("unknown automaton state {0}")]
    UnknownState(String),
    #[error("missing {which} annotation for state {state}")]
    MissingAnnotation { which: &'static str, state: String },
    #[error("malformed automaton document: {0}")]
    Document(String),
}

impl Guard {
    /// Conjunction of literals; `True` for an empty slice.
    pub fn conjunction(lits: &[(String, bool)]) -> Guard {
        lits.iter()
            .map(|(a, pos)| {
                if *pos {
                    Guard::Atom(a.clone())
                } else {
                    Guard::Not(a.clone())
                }
            })
            .reduce(|acc, g| Guard::And(Box::new(acc), Box::new(g)))
            .unwrap_or(Guard::True)
    }

    pub fn atoms(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(g) = stack.pop() {
            match g {
                Guard::True => {}
                Guard::Atom(a) | Guard::Not(a) => {
                    out.insert(a.clone());
                }
                Guard::And(a, b) | Guard::Or(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        out
    }

    /// Evaluates the guard; `label` returns `None` for unassigned atoms.
    pub fn eval<F>(&self, label: &F) -> Result<bool, AutomatonError>
    where
        F: Fn(&str) -> Option<bool>,
    {
        let value = |a: &str| label(a).ok_or_else(|| AutomatonError::UnassignedAtom(a.into()));
        Ok(match self {
            Guard::True => true,
            Guard::Atom(a) => value(a)?,
            Guard::Not(a) => !value(a)?,
            Guard::And(a, b) => a.eval(label)? && b.eval(label)?,
            Guard::Or(a, b) => a.eval(label)? || b.eval(label)?,
        })
    }

    /// Evaluates against a complete label given as a map.
    pub fn eval_map(&self, label: &BTreeMap<String, bool>) -> Result<bool, AutomatonError> {
        self.eval(&|a: &str| label.get(a).copied())
    }

    pub fn to_formula(&self) -> Formula {
        match self {
            Guard::True => Formula::True,
            Guard::Atom(a) => Formula::atom(a.clone()),
            Guard::Not(a) => Formula::atom(a.clone()).not(),
            Guard::And(a, b) => a.to_formula().and(b.to_formula()),
            Guard::Or(a, b) => a.to_formula().or(b.to_formula()),
        }
    }

    pub fn from_formula(f: &Formula) -> Result<Guard, AutomatonError> {
        Ok(match f {
            Formula::True => Guard::True,
            Formula::Atom(a) => Guard::Atom(a.clone()),
            Formula::NegAtom(a) => Guard::Not(a.clone()),
            Formula::Not(inner) => match inner.as_ref() {
                Formula::Atom(a) => Guard::Not(a.clone()),
                _ => return Err(AutomatonError::NotAGuard(f.to_string())),
            },
            Formula::And(a, b) => {
                Guard::And(Box::new(Self::from_formula(a)?), Box::new(Self::from_formula(b)?))
            }
            Formula::Or(a, b) => {
                Guard::Or(Box::new(Self::from_formula(a)?), Box::new(Self::from_formula(b)?))
            }
            _ => return Err(AutomatonError::NotAGuard(f.to_string())),
        })
    }

    pub fn parse(text: &str) -> Result<Guard, AutomatonError> {
        let f = ltl::parse(text).map_err(|source| AutomatonError::Parse {
            text: text.into(),
            source,
        })?;
        Self::from_formula(&f)
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_formula())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub guard: Guard,
    pub to: usize,
}

/// A state-based Büchi automaton. Edges keep their declaration order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Buchi {
    states: Vec<String>,
    initial: Vec<usize>,
    accepting: Vec<bool>,
    edges: Vec<Edge>,
    outgoing: Vec<Vec<usize>>,
    eta: Vec<Formula>,
    mu: Vec<Formula>,
}

impl Buchi {
    /// Builds an automaton; `mu` is derived from `eta` as `to_nnf(!eta)`.
    pub fn new(
        states: Vec<String>,
        initial: Vec<usize>,
        accepting: BTreeSet<usize>,
        edges: Vec<Edge>,
        eta: Vec<Formula>,
    ) -> Self {
        let mu = eta.iter().map(ltl::negate).collect();
        Self::with_annotations(states, initial, accepting, edges, eta, mu)
    }

    fn with_annotations(
        states: Vec<String>,
        initial: Vec<usize>,
        accepting: BTreeSet<usize>,
        edges: Vec<Edge>,
        eta: Vec<Formula>,
        mu: Vec<Formula>,
    ) -> Self {
        let n = states.len();
        let mut outgoing = vec![Vec::new(); n];
        for (i, e) in edges.iter().enumerate() {
            outgoing[e.from].push(i);
        }
        Buchi {
            accepting: (0..n).map(|q| accepting.contains(&q)).collect(),
            states,
            initial,
            edges,
            outgoing,
            eta,
            mu,
        }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_id(&self, q: usize) -> &str {
        &self.states[q]
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s == id)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, q: usize) -> bool {
        self.accepting[q]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Outgoing edges of `q` in declaration order.
    pub fn outgoing(&self, q: usize) -> impl Iterator<Item = &Edge> {
        self.outgoing[q].iter().map(move |&i| &self.edges[i])
    }

    pub fn eta(&self, q: usize) -> &Formula {
        &self.eta[q]
    }

    pub fn mu(&self, q: usize) -> &Formula {
        &self.mu[q]
    }

    pub fn guard_atoms(&self) -> BTreeSet<String> {
        self.edges.iter().flat_map(|e| e.guard.atoms()).collect()
    }

    pub fn to_document(&self) -> AutomatonDoc {
        let name = |q: usize| self.states[q].clone();
        AutomatonDoc {
            states: self.states.clone(),
            initial: self.initial.iter().map(|&q| name(q)).collect(),
            accepting: (0..self.len()).filter(|&q| self.accepting[q]).map(name).collect(),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeDoc { from: name(e.from), guard: e.guard.to_string(), to: name(e.to) })
                .collect(),
            eta: (0..self.len()).map(|q| (name(q), self.eta[q].to_string())).collect(),
            mu: (0..self.len()).map(|q| (name(q), self.mu[q].to_string())).collect(),
        }
    }

    pub fn from_document(doc: &AutomatonDoc) -> Result<Self, AutomatonError> {
        let index = |id: &str| {
            doc.states
                .iter()
                .position(|s| s == id)
                .ok_or_else(|| AutomatonError::UnknownState(id.into()))
        };
        let formula = |text: &str| {
            ltl::parse(text)
                .map(|f| to_nnf(&f))
                .map_err(|source| AutomatonError::Parse { text: text.into(), source })
        };
        let initial = doc.initial.iter().map(|s| index(s)).collect::<Result<Vec<_>, _>>()?;
        let accepting = doc.accepting.iter().map(|s| index(s)).collect::<Result<_, _>>()?;
        let edges = doc
            .edges
            .iter()
            .map(|e| {
                Ok(Edge { from: index(&e.from)?, guard: Guard::parse(&e.guard)?, to: index(&e.to)? })
            })
            .collect::<Result<Vec<_>, AutomatonError>>()?;
        let mut eta = Vec::new();
        let mut mu = Vec::new();
        for s in &doc.states {
            let e = doc
                .eta
                .get(s)
                .ok_or_else(|| AutomatonError::MissingAnnotation { which: "eta", state: s.clone() })?;
            let e = formula(e)?;
            let m = match doc.mu.get(s) {
                Some(text) => formula(text)?,
                None => ltl::negate(&e),
            };
            eta.push(e);
            mu.push(m);
        }
        Ok(Self::with_annotations(doc.states.clone(), initial, accepting, edges, eta, mu))
    }

    pub fn from_json(text: &str) -> Result<Self, AutomatonError> {
        let doc: AutomatonDoc =
            serde_json::from_str(text).map_err(|e| AutomatonError::Document(e.to_string()))?;
        Self::from_document(&doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("document serializes")
    }

    /// Content fingerprint, stable across runs.
    pub fn fingerprint(&self) -> String {
        let doc = serde_json::to_string(&self.to_document()).expect("document serializes");
        crate::pks::fingerprint_of(doc.as_bytes())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub from: String,
    pub guard: String,
    pub to: String,
}

/// Serialized automaton: guards and annotations in LTL syntax.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomatonDoc {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
    pub edges: Vec<EdgeDoc>,
    pub eta: BTreeMap<String, String>,
    #[serde(default)]
    pub mu: BTreeMap<String, String>,
}

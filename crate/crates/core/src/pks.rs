//! Partial Kripke structures: three-valued labelings, complement closure,
//! the optimistic/pessimistic approximations and completion enumeration.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::ltl::{bar, is_barred, is_valid_atom_name};

/// Default upper bound on the number of unknown (state, atom) pairs that
/// [`enumerate_completions`] accepts.
pub const DEFAULT_COMPLETION_CAP: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ThreeValue {
    T,
    F,
    U,
}

impl ThreeValue {
    /// Three-valued negation; `U` is its own complement.
    pub fn comp(self) -> Self {
        match self {
            ThreeValue::T => ThreeValue::F,
            ThreeValue::F => ThreeValue::T,
            ThreeValue::U => ThreeValue::U,
        }
    }

    pub fn meet(self, other: Self) -> Self {
        use ThreeValue::*;
        match (self, other) {
            (F, _) | (_, F) => F,
            (T, T) => T,
            _ => U,
        }
    }

    pub fn join(self, other: Self) -> Self {
        use ThreeValue::*;
        match (self, other) {
            (T, _) | (_, T) => T,
            (F, F) => F,
            _ => U,
        }
    }

    /// Information order: `U` is below both `T` and `F`.
    pub fn info_le(self, other: Self) -> bool {
        self == ThreeValue::U || self == other
    }
}

impl From<bool> for ThreeValue {
    fn from(b: bool) -> Self {
        if b {
            ThreeValue::T
        } else {
            ThreeValue::F
        }
    }
}

impl fmt::Display for ThreeValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThreeValue::T => "T",
            ThreeValue::F => "F",
            ThreeValue::U => "U",
        })
    }
}

/// One state of a partial Kripke structure as it appears in the document.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StateDecl {
    pub id: String,
    pub labels: BTreeMap<String, ThreeValue>,
}

/// A partial Kripke structure, kept in document form so that malformed
/// inputs can be represented and reported by [`PartialKripke::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartialKripke {
    pub atoms: Vec<String>,
    pub states: Vec<StateDecl>,
    pub initial: Vec<String>,
    pub transitions: Vec<(String, String)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    DuplicateState { state: String },
    InvalidStateId { state: String },
    InvalidAtom { atom: String },
    DuplicateAtom { atom: String },
    NoInitialState,
    UnknownInitial { state: String },
    DanglingTransition { from: String, to: String },
    NonTotal { state: String },
    MissingLabel { state: String, atom: String },
    UndeclaredAtomLabel { state: String, atom: String },
    MissingComplement { atom: String },
    ComplementMismatch { state: String, atom: String },
    Unreachable { state: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

impl Violation {
    /// Warnings do not compromise the analysis; they are rejected only in
    /// strict mode.
    pub fn severity(&self) -> Severity {
        match self {
            Violation::UndeclaredAtomLabel { .. } | Violation::Unreachable { .. } => {
                Severity::Warning
            }
            _ => Severity::Error,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateState { state } => write!(f, "duplicate state {state}"),
            InvalidStateId { state } => write!(f, "invalid state id '{state}'"),
            InvalidAtom { atom } => write!(f, "invalid atom name '{atom}'"),
            DuplicateAtom { atom } => write!(f, "duplicate atom {atom}"),
            NoInitialState => write!(f, "no initial state"),
            UnknownInitial { state } => write!(f, "initial state {state} is not declared"),
            DanglingTransition { from, to } => {
                write!(f, "dangling transition {from} -> {to}")
            }
            NonTotal { state } => write!(f, "non-total state {state}"),
            MissingLabel { state, atom } => write!(f, "undefined label {atom} at state {state}"),
            UndeclaredAtomLabel { state, atom } => {
                write!(f, "label for undeclared atom {atom} at state {state}")
            }
            MissingComplement { atom } => write!(f, "complement of atom {atom} is missing"),
            ComplementMismatch { state, atom } => {
                write!(f, "complement mismatch for {atom} at state {state}")
            }
            Unreachable { state } => write!(f, "state {state} is unreachable"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PksError {
    #[error("structure is already complement-closed (atom {0})")]
    AlreadyClosed(String),
    #[error("invalid structure: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("{count} unknown values exceed the completion cap of {cap}")]
    CapExceeded { count: usize, cap: usize },
    #[error("malformed structure document: {0}")]
    Document(String),
}

/// State ids must be usable inside the proof judgment syntax.
pub fn is_valid_state_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.' | '\''))
}

impl PartialKripke {
    pub fn from_json(text: &str) -> Result<Self, PksError> {
        serde_json::from_str(text).map_err(|e| PksError::Document(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("document serializes")
    }

    pub fn state(&self, id: &str) -> Option<&StateDecl> {
        self.states.iter().find(|s| s.id == id)
    }

    pub fn is_complement_closed(&self) -> bool {
        self.atoms.iter().any(|a| is_barred(a))
    }

    /// Every breach of the structural invariants, in a deterministic order.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let mut ids = BTreeSet::new();
        for s in &self.states {
            if !ids.insert(s.id.as_str()) {
                out.push(Violation::DuplicateState { state: s.id.clone() });
            }
            if !is_valid_state_id(&s.id) {
                out.push(Violation::InvalidStateId { state: s.id.clone() });
            }
        }
        let mut atoms = BTreeSet::new();
        for a in &self.atoms {
            let base = a.strip_suffix(crate::ltl::COMPLEMENT_MARKER).unwrap_or(a);
            if !is_valid_atom_name(base) {
                out.push(Violation::InvalidAtom { atom: a.clone() });
            }
            if !atoms.insert(a.as_str()) {
                out.push(Violation::DuplicateAtom { atom: a.clone() });
            }
        }
        if self.initial.is_empty() {
            out.push(Violation::NoInitialState);
        }
        for i in &self.initial {
            if !ids.contains(i.as_str()) {
                out.push(Violation::UnknownInitial { state: i.clone() });
            }
        }
        let mut has_succ = BTreeSet::new();
        for (from, to) in &self.transitions {
            if ids.contains(from.as_str()) && ids.contains(to.as_str()) {
                has_succ.insert(from.as_str());
            } else {
                out.push(Violation::DanglingTransition { from: from.clone(), to: to.clone() });
            }
        }
        for s in &self.states {
            if !has_succ.contains(s.id.as_str()) {
                out.push(Violation::NonTotal { state: s.id.clone() });
            }
        }
        for s in &self.states {
            for a in &self.atoms {
                if !s.labels.contains_key(a) {
                    out.push(Violation::MissingLabel { state: s.id.clone(), atom: a.clone() });
                }
            }
            for a in s.labels.keys() {
                if !atoms.contains(a.as_str()) {
                    out.push(Violation::UndeclaredAtomLabel {
                        state: s.id.clone(),
                        atom: a.clone(),
                    });
                }
            }
        }
        if self.is_complement_closed() {
            for a in &self.atoms {
                if !atoms.contains(bar(a).as_str()) {
                    out.push(Violation::MissingComplement { atom: a.clone() });
                }
            }
            for s in &self.states {
                for a in self.atoms.iter().filter(|a| !is_barred(a)) {
                    if let (Some(v), Some(w)) = (s.labels.get(a), s.labels.get(&bar(a))) {
                        if *w != v.comp() {
                            out.push(Violation::ComplementMismatch {
                                state: s.id.clone(),
                                atom: bar(a),
                            });
                        }
                    }
                }
            }
        }
        let reachable = self.reachable();
        for s in &self.states {
            if !reachable.contains(s.id.as_str()) {
                out.push(Violation::Unreachable { state: s.id.clone() });
            }
        }
        out
    }

    fn reachable(&self) -> BTreeSet<&str> {
        let mut adj: HashMap<&str, Vec<&str>> = HashMap::new();
        for (a, b) in &self.transitions {
            adj.entry(a.as_str()).or_default().push(b.as_str());
        }
        let mut seen: BTreeSet<&str> = BTreeSet::new();
        let mut queue: VecDeque<&str> = self.initial.iter().map(String::as_str).collect();
        while let Some(s) = queue.pop_front() {
            if seen.insert(s) {
                queue.extend(adj.get(s).into_iter().flatten().copied());
            }
        }
        seen
    }

    fn ensure_valid(&self) -> Result<(), PksError> {
        let errors: Vec<_> = self
            .validate()
            .into_iter()
            .filter(|v| v.severity() == Severity::Error)
            .collect();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(PksError::Invalid(errors))
        }
    }

    /// Adds, for every atom `p`, the barred atom `p~` labeled with the
    /// three-valued complement of `p`.
    pub fn complement_close(&self) -> Result<PartialKripke, PksError> {
        if let Some(a) = self.atoms.iter().find(|a| is_barred(a)) {
            return Err(PksError::AlreadyClosed(a.clone()));
        }
        let mut atoms = self.atoms.clone();
        atoms.extend(self.atoms.iter().map(|a| bar(a)));
        let states = self
            .states
            .iter()
            .map(|s| {
                let mut labels = s.labels.clone();
                for a in &self.atoms {
                    if let Some(v) = s.labels.get(a) {
                        labels.insert(bar(a), v.comp());
                    }
                }
                StateDecl { id: s.id.clone(), labels }
            })
            .collect();
        Ok(PartialKripke {
            atoms,
            states,
            initial: self.initial.clone(),
            transitions: self.transitions.clone(),
        })
    }

    /// Every `U` becomes `F`, barred atoms included.
    pub fn pessimistic(&self) -> Result<Kripke, PksError> {
        self.resolve(|_, _| false)
    }

    /// Every `U` becomes `T`, barred atoms included.
    pub fn optimistic(&self) -> Result<Kripke, PksError> {
        self.resolve(|_, _| true)
    }

    /// Unknown (state, atom) pairs over unbarred atoms, sorted by
    /// (state id, atom name).
    pub fn unknowns(&self) -> Vec<(String, String)> {
        let mut out: Vec<(String, String)> = self
            .states
            .iter()
            .flat_map(|s| {
                self.atoms
                    .iter()
                    .filter(|a| !is_barred(a))
                    .filter(move |a| s.labels.get(*a) == Some(&ThreeValue::U))
                    .map(move |a| (s.id.clone(), a.clone()))
            })
            .collect();
        out.sort();
        out
    }

    /// Resolves each unknown with `choose(state, atom)`.
    fn resolve(&self, choose: impl Fn(&str, &str) -> bool) -> Result<Kripke, PksError> {
        self.ensure_valid()?;
        let index: HashMap<&str, usize> = self
            .states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.id.as_str(), i))
            .collect();
        let mut successors = vec![Vec::new(); self.states.len()];
        for (a, b) in &self.transitions {
            let (i, j) = (index[a.as_str()], index[b.as_str()]);
            if !successors[i].contains(&j) {
                successors[i].push(j);
            }
        }
        let labels = self
            .states
            .iter()
            .map(|s| {
                self.atoms
                    .iter()
                    .map(|a| match s.labels[a] {
                        ThreeValue::T => true,
                        ThreeValue::F => false,
                        ThreeValue::U => choose(&s.id, a),
                    })
                    .collect()
            })
            .collect();
        Ok(Kripke {
            atoms: self.atoms.clone(),
            states: self.states.iter().map(|s| s.id.clone()).collect(),
            initial: self.initial.iter().map(|i| index[i.as_str()]).collect(),
            successors,
            labels,
        })
    }
}

/// All classical completions of `m`, lazily, in a fixed order: unknowns
/// sorted by (state id, atom name), each assigned `F` before `T`, the first
/// unknown varying slowest. Barred atoms follow their partner.
pub fn enumerate_completions(
    m: &PartialKripke,
    cap: usize,
) -> Result<impl Iterator<Item = Kripke> + '_, PksError> {
    m.ensure_valid()?;
    let unknowns = m.unknowns();
    if unknowns.len() > cap {
        return Err(PksError::CapExceeded { count: unknowns.len(), cap });
    }
    let k = unknowns.len();
    Ok((0u64..1u64 << k).map(move |bits| {
        let assigned = |state: &str, atom: &str| -> bool {
            let (base, flip) = match atom.strip_suffix(crate::ltl::COMPLEMENT_MARKER) {
                Some(b) => (b, true),
                None => (atom, false),
            };
            let j = unknowns
                .iter()
                .position(|(s, a)| s == state && a == base)
                .expect("every unknown is enumerated");
            let value = (bits >> (k - 1 - j)) & 1 == 1;
            value != flip
        };
        m.resolve(assigned).expect("validated above")
    }))
}

/// A classical (two-valued) Kripke structure with index-based states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Kripke {
    atoms: Vec<String>,
    states: Vec<String>,
    initial: Vec<usize>,
    successors: Vec<Vec<usize>>,
    labels: Vec<Vec<bool>>,
}

impl Kripke {
    /// Builds a structure from explicit parts; `labels[s]` lists the atoms
    /// true at state `s`, every other atom is false.
    pub fn new(
        atoms: Vec<String>,
        states: Vec<String>,
        initial: Vec<usize>,
        successors: Vec<Vec<usize>>,
        true_atoms: Vec<BTreeSet<String>>,
    ) -> Result<Self, PksError> {
        let n = states.len();
        let mut errors = Vec::new();
        if initial.is_empty() {
            errors.push(Violation::NoInitialState);
        }
        if successors.len() != n || true_atoms.len() != n {
            return Err(PksError::Document("per-state vectors differ in length".into()));
        }
        for (i, succ) in successors.iter().enumerate() {
            if succ.is_empty() {
                errors.push(Violation::NonTotal { state: states[i].clone() });
            }
            for &j in succ {
                if j >= n {
                    errors.push(Violation::DanglingTransition {
                        from: states[i].clone(),
                        to: j.to_string(),
                    });
                }
            }
        }
        if let Some(&bad) = initial.iter().find(|&&i| i >= n) {
            errors.push(Violation::UnknownInitial { state: bad.to_string() });
        }
        if !errors.is_empty() {
            return Err(PksError::Invalid(errors));
        }
        let labels = true_atoms
            .iter()
            .map(|set| atoms.iter().map(|a| set.contains(a)).collect())
            .collect();
        Ok(Kripke { atoms, states, initial, successors, labels })
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state_id(&self, s: usize) -> &str {
        &self.states[s]
    }

    pub fn state_index(&self, id: &str) -> Option<usize> {
        self.states.iter().position(|s| s == id)
    }

    pub fn atom_index(&self, atom: &str) -> Option<usize> {
        self.atoms.iter().position(|a| a == atom)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    /// Successors in declaration order.
    pub fn successors(&self, s: usize) -> &[usize] {
        &self.successors[s]
    }

    pub fn label(&self, s: usize, atom: &str) -> Option<bool> {
        self.atom_index(atom).map(|a| self.labels[s][a])
    }

    pub fn label_by_index(&self, s: usize, atom: usize) -> bool {
        self.labels[s][atom]
    }

    /// The label of `s` as an atom → value map.
    pub fn letter(&self, s: usize) -> BTreeMap<String, bool> {
        self.atoms
            .iter()
            .cloned()
            .zip(self.labels[s].iter().copied())
            .collect()
    }

    /// Back to document form (no unknowns).
    pub fn to_partial(&self) -> PartialKripke {
        PartialKripke {
            atoms: self.atoms.clone(),
            states: (0..self.len())
                .map(|s| StateDecl {
                    id: self.states[s].clone(),
                    labels: self
                        .atoms
                        .iter()
                        .cloned()
                        .zip(self.labels[s].iter().map(|&b| ThreeValue::from(b)))
                        .collect(),
                })
                .collect(),
            initial: self.initial.iter().map(|&i| self.states[i].clone()).collect(),
            transitions: (0..self.len())
                .flat_map(|s| {
                    self.successors[s]
                        .iter()
                        .map(move |&t| (self.states[s].clone(), self.states[t].clone()))
                })
                .collect(),
        }
    }

    /// Content fingerprint, stable across runs.
    pub fn fingerprint(&self) -> String {
        let doc = serde_json::to_string(&self.to_partial()).expect("document serializes");
        fingerprint_of(doc.as_bytes())
    }
}

pub(crate) fn fingerprint_of(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let hex: String = digest.iter().take(8).map(|b| format!("{b:02x}")).collect();
    format!("sha256:{hex}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use ThreeValue::*;

    fn tiny(labels: &[(&str, &[(&str, ThreeValue)])], transitions: &[(&str, &str)]) -> PartialKripke {
        let mut atoms: Vec<String> = labels
            .iter()
            .flat_map(|(_, ls)| ls.iter().map(|(a, _)| a.to_string()))
            .collect();
        atoms.sort();
        atoms.dedup();
        PartialKripke {
            atoms,
            states: labels
                .iter()
                .map(|(id, ls)| StateDecl {
                    id: id.to_string(),
                    labels: ls.iter().map(|(a, v)| (a.to_string(), *v)).collect(),
                })
                .collect(),
            initial: vec![labels[0].0.to_string()],
            transitions: transitions
                .iter()
                .map(|(a, b)| (a.to_string(), b.to_string()))
                .collect(),
        }
    }

    #[test]
    fn three_valued_lattice() {
        assert_eq!(T.comp(), F);
        assert_eq!(F.comp(), T);
        assert_eq!(U.comp(), U);
        assert_eq!(T.meet(U), U);
        assert_eq!(F.meet(U), F);
        assert_eq!(T.join(U), T);
        assert_eq!(F.join(U), U);
        assert!(U.info_le(T) && U.info_le(F));
        assert!(!T.info_le(F) && !F.info_le(T));
    }

    #[test]
    fn non_total_state_is_reported() {
        let m = tiny(&[("a", &[("p", T)]), ("x", &[("p", F)])], &[("a", "x")]);
        assert_eq!(m.validate(), vec![Violation::NonTotal { state: "x".into() }]);
        assert_eq!(m.validate()[0].to_string(), "non-total state x");
    }

    #[test]
    fn complement_mismatch_is_reported() {
        let m = tiny(
            &[("s", &[("fl", U), ("fl~", T)])],
            &[("s", "s")],
        );
        assert_eq!(
            m.validate(),
            vec![Violation::ComplementMismatch { state: "s".into(), atom: "fl~".into() }]
        );
    }

    #[test]
    fn dangling_transition_and_missing_label() {
        let mut m = tiny(&[("a", &[("p", T), ("q", F)])], &[("a", "a"), ("a", "zz")]);
        m.states[0].labels.remove("q");
        let v = m.validate();
        assert!(v.contains(&Violation::DanglingTransition { from: "a".into(), to: "zz".into() }));
        assert!(v.contains(&Violation::MissingLabel { state: "a".into(), atom: "q".into() }));
    }

    #[test]
    fn complement_close_labels() {
        let m = tiny(&[("s", &[("fl", T), ("cert", F), ("sl", U)])], &[("s", "s")]);
        let c = m.complement_close().unwrap();
        let l = &c.state("s").unwrap().labels;
        assert_eq!(l["fl~"], F);
        assert_eq!(l["cert~"], T);
        assert_eq!(l["sl~"], U);
        assert!(c.validate().is_empty());
        assert!(matches!(c.complement_close(), Err(PksError::AlreadyClosed(_))));
    }

    #[test]
    fn approximations_break_complement_pairing() {
        let m = tiny(&[("s7", &[("fl", U)])], &[("s7", "s7")]);
        let c = m.complement_close().unwrap();
        let pes = c.pessimistic().unwrap();
        let opt = c.optimistic().unwrap();
        assert_eq!(pes.label(0, "fl"), Some(false));
        assert_eq!(pes.label(0, "fl~"), Some(false));
        assert_eq!(opt.label(0, "fl"), Some(true));
        assert_eq!(opt.label(0, "fl~"), Some(true));
    }

    #[test]
    fn u_free_structure_is_its_own_approximation() {
        let m = tiny(&[("a", &[("p", T)]), ("b", &[("p", F)])], &[("a", "b"), ("b", "a")]);
        let pes = m.pessimistic().unwrap();
        assert_eq!(pes, m.optimistic().unwrap());
        assert_eq!(pes.to_partial(), m);
        let all: Vec<_> = enumerate_completions(&m, DEFAULT_COMPLETION_CAP).unwrap().collect();
        assert_eq!(all, vec![pes]);
    }

    #[test]
    fn one_unknown_two_completions_false_first() {
        let m = tiny(&[("a", &[("p", U)])], &[("a", "a")]);
        let all: Vec<_> = enumerate_completions(&m, DEFAULT_COMPLETION_CAP).unwrap().collect();
        assert_eq!(all.len(), 2);
        assert_eq!(all[0].label(0, "p"), Some(false));
        assert_eq!(all[1].label(0, "p"), Some(true));
    }

    #[test]
    fn completions_of_closed_structure_respect_pairing() {
        let m = tiny(&[("a", &[("p", U), ("q", U)])], &[("a", "a")])
            .complement_close()
            .unwrap();
        for c in enumerate_completions(&m, DEFAULT_COMPLETION_CAP).unwrap() {
            for atom in ["p", "q"] {
                assert_ne!(c.label(0, atom), c.label(0, &bar(atom)));
            }
        }
    }

    #[test]
    fn cap_is_enforced() {
        let m = tiny(&[("a", &[("p", U), ("q", U), ("r", U)])], &[("a", "a")]);
        assert!(matches!(
            enumerate_completions(&m, 2).map(|_| ()),
            Err(PksError::CapExceeded { count: 3, cap: 2 })
        ));
    }

    #[test]
    fn kripke_new_rejects_non_total() {
        let err = Kripke::new(
            vec!["p".into()],
            vec!["a".into()],
            vec![0],
            vec![vec![]],
            vec![BTreeSet::new()],
        );
        assert!(matches!(err, Err(PksError::Invalid(_))));
    }
}

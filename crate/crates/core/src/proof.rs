//! Deductive temporal proofs extracted from an empty product.
//!
//! A judgment `s |= mu(q)` states that no accepting run of the automaton
//! starts in `q` along any path from model state `s`, i.e. the product has
//! no accepting path from `<s,q>`. Four rules derive judgments:
//!
//! * **Fail**: `<s,q>` has no product successor.
//! * **Induction**: a non-trivial SCC without accepting nodes, once every
//!   node one edge outside it (its exit set) is proved.
//! * **Successors**: a node whose product successors are all proved.
//! * **Conclusion**: every initial node is proved, hence `M |= phi`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ltl::Formula;
use crate::product::{bfs_depths, scc_decomposition, NodeRef, Pair, Product};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StepKind {
    Fail,
    Induction,
    Successors,
    Conclusion,
}

impl fmt::Display for StepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepKind::Fail => "Fail",
            StepKind::Induction => "Induction",
            StepKind::Successors => "Successors",
            StepKind::Conclusion => "Conclusion",
        })
    }
}

/// Facts a step relies on.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Premise {
    /// `<s,q> has no successors`
    NoSuccessors(NodeRef),
    /// `s -> {t1, t2}`: model transitions out of `s`
    Transitions { from: String, to: Vec<String> },
    /// `s |= mu(q1) & mu(q2)`: previously proved judgments
    Holds { state: String, qs: Vec<String> },
}

/// Facts a step establishes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Claim {
    /// `s |= mu(q) = <formula>`
    Holds { state: String, q: String, formula: String },
    /// `M |= <formula>`
    Model { formula: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProofStep {
    pub kind: StepKind,
    pub component: Vec<NodeRef>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exit: Vec<NodeRef>,
    pub premises: Vec<Premise>,
    pub conclusions: Vec<Claim>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Proof {
    /// The property the proof concludes, in LTL syntax.
    pub property: String,
    /// Fingerprint of the model the product was built from.
    pub model: String,
    /// Fingerprint of the automaton the product was built from.
    pub automaton: String,
    pub steps: Vec<ProofStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error("the product has an accepting lasso; no proof exists")]
    NonEmptyProduct,
    #[error("no rule discharges node {0}")]
    RuleCoverage(NodeRef),
    #[error("proof refers to {which} {found}, product has {expected}")]
    Mismatch {
        which: &'static str,
        found: String,
        expected: String,
    },
    #[error("malformed proof document: {0}")]
    Document(String),
}

/// Why a step was rejected.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RejectReason {
    UnknownNode(NodeRef),
    EmptyComponent,
    NodeHasSuccessors(NodeRef),
    AcceptingInComponent(NodeRef),
    NotStronglyConnected,
    NotMaximal(NodeRef),
    ExitMismatch,
    PremiseNotProved(NodeRef),
    SuccessorUndischarged(NodeRef),
    FalseTransitionFact(String),
    MissingTransitionFact(String),
    WrongConclusion(String),
    MissingConclusion(NodeRef),
    UnexpectedPremise(String),
    InitialUndischarged(NodeRef),
    ConclusionNotLast,
    NoConclusion,
    SingleNodeExpected,
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use RejectReason::*;
        match self {
            UnknownNode(n) => write!(f, "unknown node {n}"),
            EmptyComponent => write!(f, "empty component"),
            NodeHasSuccessors(n) => write!(f, "node has successors: {n}"),
            AcceptingInComponent(n) => write!(f, "component contains accepting node {n}"),
            NotStronglyConnected => write!(f, "component is not strongly connected"),
            NotMaximal(n) => write!(f, "component is not a maximal SCC: exit {n} reaches back"),
            ExitMismatch => write!(f, "exit set does not match the product"),
            PremiseNotProved(n) => write!(f, "premise not proved earlier: {n}"),
            SuccessorUndischarged(n) => write!(f, "successor not proved earlier: {n}"),
            FalseTransitionFact(t) => write!(f, "transition fact does not hold: {t}"),
            MissingTransitionFact(s) => write!(f, "missing transition fact for {s}"),
            WrongConclusion(c) => write!(f, "conclusion does not follow: {c}"),
            MissingConclusion(n) => write!(f, "no conclusion for {n}"),
            UnexpectedPremise(p) => write!(f, "premise not allowed by the rule: {p}"),
            InitialUndischarged(n) => write!(f, "initial node undischarged: {n}"),
            ConclusionNotLast => write!(f, "conclusion is not the last step"),
            NoConclusion => write!(f, "proof has no conclusion step"),
            SingleNodeExpected => write!(f, "rule applies to a single node"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Checked {
    Accepted,
    Rejected { step: usize, reason: RejectReason },
}

impl Checked {
    pub fn is_accepted(&self) -> bool {
        matches!(self, Checked::Accepted)
    }
}

// --- text forms -----------------------------------------------------------

impl fmt::Display for Premise {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Premise::NoSuccessors(n) => write!(f, "{n} has no successors"),
            Premise::Transitions { from, to } => write!(f, "{from} -> {{{}}}", to.join(", ")),
            Premise::Holds { state, qs } => {
                let parts: Vec<String> = qs.iter().map(|q| format!("mu({q})")).collect();
                write!(f, "{state} |= {}", parts.join(" & "))
            }
        }
    }
}

impl FromStr for Premise {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(node) = s.strip_suffix(" has no successors") {
            return Ok(Premise::NoSuccessors(node.parse()?));
        }
        if let Some((from, rest)) = s.split_once(" -> ") {
            let inner = rest
                .strip_prefix('{')
                .and_then(|r| r.strip_suffix('}'))
                .ok_or_else(|| format!("malformed transition fact '{s}'"))?;
            let to = inner
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(String::from)
                .collect();
            return Ok(Premise::Transitions { from: from.into(), to });
        }
        if let Some((state, rest)) = s.split_once(" |= ") {
            let qs = rest
                .split(" & ")
                .map(|part| {
                    part.strip_prefix("mu(")
                        .and_then(|r| r.strip_suffix(')'))
                        .map(String::from)
                        .ok_or_else(|| format!("malformed judgment '{s}'"))
                })
                .collect::<Result<_, _>>()?;
            return Ok(Premise::Holds { state: state.into(), qs });
        }
        Err(format!("unrecognized premise '{s}'"))
    }
}

impl TryFrom<String> for Premise {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Premise> for String {
    fn from(p: Premise) -> String {
        p.to_string()
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Holds { state, q, formula } => write!(f, "{state} |= mu({q}) = {formula}"),
            Claim::Model { formula } => write!(f, "M |= {formula}"),
        }
    }
}

impl FromStr for Claim {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if let Some(formula) = s.strip_prefix("M |= ") {
            return Ok(Claim::Model { formula: formula.into() });
        }
        let (state, rest) = s
            .split_once(" |= mu(")
            .ok_or_else(|| format!("malformed claim '{s}'"))?;
        let (q, formula) = rest
            .split_once(") = ")
            .ok_or_else(|| format!("malformed claim '{s}'"))?;
        Ok(Claim::Holds { state: state.into(), q: q.into(), formula: formula.into() })
    }
}

impl TryFrom<String> for Claim {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Claim> for String {
    fn from(c: Claim) -> String {
        c.to_string()
    }
}

// --- generation -----------------------------------------------------------

fn holds_claim(p: &Product, pair: Pair) -> Claim {
    let r = p.pair_ref(pair);
    Claim::Holds { state: r.state, q: r.q, formula: p.automaton().mu(pair.q).to_string() }
}

/// Groups pairs by model state (in node order) into `Holds` premises with
/// automaton states sorted by id.
fn holds_premises(p: &Product, pairs: &[Pair]) -> Vec<Premise> {
    let mut grouped: Vec<(String, BTreeSet<String>)> = Vec::new();
    for &pair in pairs {
        let r = p.pair_ref(pair);
        match grouped.iter_mut().find(|(s, _)| *s == r.state) {
            Some((_, qs)) => {
                qs.insert(r.q);
            }
            None => grouped.push((r.state, BTreeSet::from([r.q]))),
        }
    }
    grouped
        .into_iter()
        .map(|(state, qs)| Premise::Holds { state, qs: qs.into_iter().collect() })
        .collect()
}

fn transition_fact(p: &Product, from: usize, to: impl IntoIterator<Item = usize>) -> Premise {
    let m = p.model();
    let mut to: Vec<String> = to.into_iter().map(|t| m.state_id(t).to_string()).collect();
    to.sort();
    to.dedup();
    Premise::Transitions { from: m.state_id(from).to_string(), to }
}

/// Builds a proof that the (empty) product has no accepting run, i.e. that
/// the model satisfies `property`. Unreachable nodes behind guard-blocked
/// transitions are materialized first (see [`Product::materialize`]).
pub fn generate_proof(product: &Product, property: &Formula) -> Result<Proof, ProofError> {
    if product.find_accepting_lasso().is_some() {
        return Err(ProofError::NonEmptyProduct);
    }
    let mut p = product.clone();
    p.materialize();
    let n = p.len();
    let mut proved = vec![false; n];
    let mut steps = Vec::new();

    for node in p.fail_nodes() {
        let pair = p.pair(node);
        steps.push(ProofStep {
            kind: StepKind::Fail,
            component: vec![p.node_ref(node)],
            exit: vec![],
            premises: vec![Premise::NoSuccessors(p.node_ref(node))],
            conclusions: vec![holds_claim(&p, pair)],
        });
        proved[node] = true;
    }

    let sccs = scc_decomposition(&p);
    let depth = bfs_depths(&p);
    let mut comp_of = vec![0usize; n];
    for (i, c) in sccs.iter().enumerate() {
        for &v in &c.nodes {
            comp_of[v] = i;
        }
    }
    let mut pending: Vec<usize> = (0..sccs.len())
        .filter(|&i| !sccs[i].nodes.iter().all(|&v| proved[v]))
        .collect();
    let mut induction_count = 0usize;

    while !pending.is_empty() {
        let ready = pending.iter().copied().filter(|&i| {
            sccs[i].nodes.iter().all(|&v| {
                p.successors(v).iter().all(|&w| comp_of[w] == i || proved[w])
            })
        });
        let best = ready.min_by_key(|&i| {
            let c = &sccs[i];
            let rank = if c.trivial { 1 } else { 0 };
            let d = c.nodes.iter().map(|&v| depth[v].unwrap_or(usize::MAX)).min();
            (rank, Reverse(d), c.nodes[0])
        });
        let Some(ci) = best else {
            let stuck = sccs[pending[0]].nodes[0];
            return Err(ProofError::RuleCoverage(p.node_ref(stuck)));
        };
        pending.retain(|&i| i != ci);
        let comp = &sccs[ci];

        if comp.trivial {
            let v = comp.nodes[0];
            let pair = p.pair(v);
            let model = p.model();
            let mut premises = vec![transition_fact(&p, pair.state, model.successors(pair.state).iter().copied())];
            // judgments for actual successors plus proved nodes behind blocked guards
            let mut cited: Vec<Pair> = p.successors(v).iter().map(|&w| p.pair(w)).collect();
            for &t in model.successors(pair.state) {
                for e in p.automaton().outgoing(pair.q) {
                    let other = Pair { state: t, q: e.to };
                    if let Some(w) = p.node_of(other) {
                        if proved[w] && !cited.contains(&other) {
                            cited.push(other);
                        }
                    }
                }
            }
            cited.sort_by_key(|c| {
                (p.model().state_id(c.state).to_string(), p.automaton().state_id(c.q).to_string())
            });
            premises.extend(holds_premises(&p, &cited));
            steps.push(ProofStep {
                kind: StepKind::Successors,
                component: vec![p.node_ref(v)],
                exit: vec![],
                premises,
                conclusions: vec![holds_claim(&p, pair)],
            });
            proved[v] = true;
        } else {
            if let Some(&acc) = comp.nodes.iter().find(|&&v| p.is_accepting(v)) {
                // an accepting node inside a cycle contradicts emptiness
                return Err(ProofError::RuleCoverage(p.node_ref(acc)));
            }
            induction_count += 1;
            let members: BTreeSet<usize> = comp.nodes.iter().copied().collect();
            let exits: BTreeSet<usize> = comp
                .nodes
                .iter()
                .flat_map(|&v| p.successors(v).iter().copied())
                .filter(|w| !members.contains(w))
                .collect();
            let exit_pairs: Vec<Pair> = exits.iter().map(|&w| p.pair(w)).collect();
            let mut premises = holds_premises(&p, &exit_pairs);
            let mut inner: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
            for &v in &comp.nodes {
                let s = p.pair(v).state;
                let entry = inner.entry(s).or_default();
                for &w in p.successors(v) {
                    if members.contains(&w) {
                        entry.insert(p.pair(w).state);
                    }
                }
            }
            let mut facts: Vec<(String, Premise)> = inner
                .into_iter()
                .map(|(s, ts)| (p.model().state_id(s).to_string(), transition_fact(&p, s, ts)))
                .collect();
            facts.sort_by(|a, b| a.0.cmp(&b.0));
            premises.extend(facts.into_iter().map(|(_, f)| f));
            let _ = induction_count;
            steps.push(ProofStep {
                kind: StepKind::Induction,
                component: comp.nodes.iter().map(|&v| p.node_ref(v)).collect(),
                exit: exits.iter().map(|&w| p.node_ref(w)).collect(),
                premises,
                conclusions: comp.nodes.iter().map(|&v| holds_claim(&p, p.pair(v))).collect(),
            });
            for &v in &comp.nodes {
                proved[v] = true;
            }
        }
    }

    let initial_pairs: Vec<Pair> = p.initial().iter().map(|&v| p.pair(v)).collect();
    steps.push(ProofStep {
        kind: StepKind::Conclusion,
        component: vec![],
        exit: vec![],
        premises: holds_premises(&p, &initial_pairs),
        conclusions: vec![Claim::Model { formula: property.to_string() }],
    });

    Ok(Proof {
        property: property.to_string(),
        model: p.model().fingerprint(),
        automaton: p.automaton().fingerprint(),
        steps,
    })
}

// --- checking -------------------------------------------------------------

struct Checker<'p, 'a> {
    product: &'p Product<'a>,
    proved: BTreeSet<Pair>,
}

type StepResult = Result<(), RejectReason>;

impl Checker<'_, '_> {
    fn resolve(&self, r: &NodeRef) -> Result<Pair, RejectReason> {
        self.product.resolve(r).ok_or_else(|| RejectReason::UnknownNode(r.clone()))
    }

    fn succ(&self, p: Pair) -> Vec<Pair> {
        self.product.successors_of_pair(p)
    }

    fn state_index(&self, id: &str) -> Result<usize, RejectReason> {
        self.product.model().state_index(id).ok_or_else(|| {
            RejectReason::UnknownNode(NodeRef { state: id.into(), q: "?".into() })
        })
    }

    fn holds_pairs(&self, state: &str, qs: &[String]) -> Result<Vec<Pair>, RejectReason> {
        qs.iter()
            .map(|q| self.resolve(&NodeRef { state: state.into(), q: q.clone() }))
            .collect()
    }

    fn check_holds_proved(&self, premise: &Premise) -> StepResult {
        if let Premise::Holds { state, qs } = premise {
            for pair in self.holds_pairs(state, qs)? {
                if !self.proved.contains(&pair) {
                    return Err(RejectReason::PremiseNotProved(self.product.pair_ref(pair)));
                }
            }
        }
        Ok(())
    }

    fn check_transition_fact(&self, premise: &Premise) -> StepResult {
        if let Premise::Transitions { from, to } = premise {
            let s = self.state_index(from)?;
            let model = self.product.model();
            for t in to {
                let t_idx = self.state_index(t)?;
                if !model.successors(s).contains(&t_idx) {
                    return Err(RejectReason::FalseTransitionFact(premise.to_string()));
                }
            }
        }
        Ok(())
    }

    fn check_conclusions(&self, step: &ProofStep, covered: &[Pair]) -> StepResult {
        let automaton = self.product.automaton();
        let mut concluded = BTreeSet::new();
        for c in &step.conclusions {
            match c {
                Claim::Holds { state, q, formula } => {
                    let pair = self.resolve(&NodeRef { state: state.clone(), q: q.clone() })?;
                    if !covered.contains(&pair) || *formula != automaton.mu(pair.q).to_string() {
                        return Err(RejectReason::WrongConclusion(c.to_string()));
                    }
                    concluded.insert(pair);
                }
                Claim::Model { .. } => return Err(RejectReason::WrongConclusion(c.to_string())),
            }
        }
        match covered.iter().find(|p| !concluded.contains(p)) {
            Some(&missing) => Err(RejectReason::MissingConclusion(self.product.pair_ref(missing))),
            None => Ok(()),
        }
    }

    fn fail(&mut self, step: &ProofStep) -> StepResult {
        let nodes = self.component(step)?;
        for &n in &nodes {
            if !self.succ(n).is_empty() {
                return Err(RejectReason::NodeHasSuccessors(self.product.pair_ref(n)));
            }
        }
        for premise in &step.premises {
            let ok = matches!(premise, Premise::NoSuccessors(r)
                if self.resolve(r).map(|p| nodes.contains(&p)).unwrap_or(false));
            if !ok {
                return Err(RejectReason::UnexpectedPremise(premise.to_string()));
            }
        }
        self.check_conclusions(step, &nodes)?;
        self.proved.extend(nodes);
        Ok(())
    }

    fn component(&self, step: &ProofStep) -> Result<Vec<Pair>, RejectReason> {
        if step.component.is_empty() {
            return Err(RejectReason::EmptyComponent);
        }
        step.component.iter().map(|r| self.resolve(r)).collect()
    }

    fn induction(&mut self, step: &ProofStep) -> StepResult {
        let nodes = self.component(step)?;
        let members: BTreeSet<Pair> = nodes.iter().copied().collect();
        let automaton = self.product.automaton();
        if let Some(&acc) = nodes.iter().find(|p| automaton.is_accepting(p.q)) {
            return Err(RejectReason::AcceptingInComponent(self.product.pair_ref(acc)));
        }
        // strongly connected through edges inside the component, non-trivial
        for &start in &nodes {
            let mut seen = BTreeSet::new();
            let mut queue: VecDeque<Pair> = VecDeque::from([start]);
            while let Some(v) = queue.pop_front() {
                for w in self.succ(v) {
                    if members.contains(&w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            if seen != members {
                return Err(RejectReason::NotStronglyConnected);
            }
        }
        let exits: BTreeSet<Pair> = nodes
            .iter()
            .flat_map(|&v| self.succ(v))
            .filter(|w| !members.contains(w))
            .collect();
        // maximality: no exit can come back
        for &e in &exits {
            let mut seen = BTreeSet::from([e]);
            let mut queue = VecDeque::from([e]);
            while let Some(v) = queue.pop_front() {
                for w in self.succ(v) {
                    if members.contains(&w) {
                        return Err(RejectReason::NotMaximal(self.product.pair_ref(e)));
                    }
                    if seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
        }
        let listed: BTreeSet<Pair> =
            step.exit.iter().map(|r| self.resolve(r)).collect::<Result<_, _>>()?;
        if listed != exits {
            return Err(RejectReason::ExitMismatch);
        }
        for &e in &exits {
            if !self.proved.contains(&e) {
                return Err(RejectReason::PremiseNotProved(self.product.pair_ref(e)));
            }
        }
        for premise in &step.premises {
            match premise {
                Premise::NoSuccessors(_) => {
                    return Err(RejectReason::UnexpectedPremise(premise.to_string()))
                }
                _ => {
                    self.check_holds_proved(premise)?;
                    self.check_transition_fact(premise)?;
                }
            }
        }
        self.check_conclusions(step, &nodes)?;
        self.proved.extend(nodes);
        Ok(())
    }

    fn successors(&mut self, step: &ProofStep) -> StepResult {
        let nodes = self.component(step)?;
        let [node] = nodes[..] else {
            return Err(RejectReason::SingleNodeExpected);
        };
        for w in self.succ(node) {
            if !self.proved.contains(&w) {
                return Err(RejectReason::SuccessorUndischarged(self.product.pair_ref(w)));
            }
        }
        let model = self.product.model();
        let mut has_fact = false;
        for premise in &step.premises {
            match premise {
                Premise::NoSuccessors(_) => {
                    return Err(RejectReason::UnexpectedPremise(premise.to_string()))
                }
                Premise::Transitions { from, to } => {
                    self.check_transition_fact(premise)?;
                    if self.state_index(from)? == node.state {
                        let listed: BTreeSet<&str> = to.iter().map(String::as_str).collect();
                        let actual: BTreeSet<&str> =
                            model.successors(node.state).iter().map(|&t| model.state_id(t)).collect();
                        if listed != actual {
                            return Err(RejectReason::FalseTransitionFact(premise.to_string()));
                        }
                        has_fact = true;
                    }
                }
                Premise::Holds { .. } => self.check_holds_proved(premise)?,
            }
        }
        if !has_fact {
            return Err(RejectReason::MissingTransitionFact(model.state_id(node.state).into()));
        }
        self.check_conclusions(step, &[node])?;
        self.proved.insert(node);
        Ok(())
    }

    fn conclusion(&self, step: &ProofStep, property: &str) -> StepResult {
        for premise in &step.premises {
            match premise {
                Premise::Holds { .. } => self.check_holds_proved(premise)?,
                _ => return Err(RejectReason::UnexpectedPremise(premise.to_string())),
            }
        }
        let mut cited = BTreeSet::new();
        for premise in &step.premises {
            if let Premise::Holds { state, qs } = premise {
                cited.extend(self.holds_pairs(state, qs)?);
            }
        }
        for &i in self.product.initial() {
            let pair = self.product.pair(i);
            if !cited.contains(&pair) {
                return Err(RejectReason::InitialUndischarged(self.product.pair_ref(pair)));
            }
        }
        match step.conclusions.as_slice() {
            [Claim::Model { formula }] if formula == property => Ok(()),
            _ => Err(RejectReason::WrongConclusion(
                step.conclusions.iter().map(|c| c.to_string()).collect::<Vec<_>>().join("; "),
            )),
        }
    }
}

/// Independently re-checks every step of `proof` against `product`,
/// recomputing successors from the model and the automaton.
pub fn check_proof(product: &Product, proof: &Proof) -> Result<Checked, ProofError> {
    let model = product.model().fingerprint();
    if proof.model != model {
        return Err(ProofError::Mismatch { which: "model", found: proof.model.clone(), expected: model });
    }
    let automaton = product.automaton().fingerprint();
    if proof.automaton != automaton {
        return Err(ProofError::Mismatch {
            which: "automaton",
            found: proof.automaton.clone(),
            expected: automaton,
        });
    }
    let mut checker = Checker { product, proved: BTreeSet::new() };
    let last = proof.steps.len().checked_sub(1);
    for (i, step) in proof.steps.iter().enumerate() {
        let result = match step.kind {
            StepKind::Fail => checker.fail(step),
            StepKind::Induction => checker.induction(step),
            StepKind::Successors => checker.successors(step),
            StepKind::Conclusion if Some(i) != last => Err(RejectReason::ConclusionNotLast),
            StepKind::Conclusion => checker.conclusion(step, &proof.property),
        };
        if let Err(reason) = result {
            return Ok(Checked::Rejected { step: i, reason });
        }
    }
    match proof.steps.last() {
        Some(s) if s.kind == StepKind::Conclusion => Ok(Checked::Accepted),
        _ => Ok(Checked::Rejected { step: proof.steps.len(), reason: RejectReason::NoConclusion }),
    }
}

// --- rendering ------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProofFormat {
    Markdown,
    Json,
}

impl Proof {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("proof serializes")
    }

    pub fn from_json(text: &str) -> Result<Proof, ProofError> {
        serde_json::from_str(text).map_err(|e| ProofError::Document(e.to_string()))
    }

    /// Judgments derived by each rule kind, e.g. for summaries.
    pub fn conclusions_by_kind(&self) -> HashMap<StepKind, Vec<NodeRef>> {
        let mut out: HashMap<StepKind, Vec<NodeRef>> = HashMap::new();
        for step in &self.steps {
            for c in &step.conclusions {
                if let Claim::Holds { state, q, .. } = c {
                    out.entry(step.kind)
                        .or_default()
                        .push(NodeRef { state: state.clone(), q: q.clone() });
                }
            }
        }
        out
    }
}

pub fn render_proof(proof: &Proof, format: ProofFormat) -> String {
    match format {
        ProofFormat::Json => proof.to_json(),
        ProofFormat::Markdown => render_markdown(proof),
    }
}

fn md_escape(s: &str) -> String {
    s.replace('|', "\\|")
}

fn md_node(n: &NodeRef) -> String {
    format!("⟨{},{}⟩", n.state, n.q)
}

fn md_nodes(ns: &[NodeRef]) -> String {
    ns.iter().map(md_node).collect::<Vec<_>>().join(", ")
}

fn md_premise(p: &Premise) -> String {
    match p {
        Premise::NoSuccessors(n) => format!("{} has no successors", md_node(n)),
        Premise::Transitions { from, to } => format!("{from} → {{{}}}", to.join(", ")),
        Premise::Holds { state, qs } => {
            let parts: Vec<String> = qs.iter().map(|q| format!("μ({q})")).collect();
            format!("{state} ⊨ {}", parts.join(" ∧ "))
        }
    }
}

fn md_claim(c: &Claim) -> String {
    match c {
        Claim::Holds { state, q, formula } => format!("{state} ⊨ μ({q}) = {}", md_escape(formula)),
        Claim::Model { formula } => format!("M ⊨ {}", md_escape(formula)),
    }
}

fn render_markdown(proof: &Proof) -> String {
    let mut out = String::new();
    out.push_str("| Step | Component | Rule |\n");
    out.push_str("|---|---|---|\n");
    let mut i = 0;
    let mut induction = 0;
    while i < proof.steps.len() {
        let step = &proof.steps[i];
        match step.kind {
            StepKind::Fail => {
                // consecutive Fail steps share one row
                let mut j = i;
                while j < proof.steps.len() && proof.steps[j].kind == StepKind::Fail {
                    j += 1;
                }
                let group = &proof.steps[i..j];
                let nodes: Vec<NodeRef> = group.iter().flat_map(|s| s.component.clone()).collect();
                let premises: Vec<String> =
                    group.iter().flat_map(|s| s.premises.iter().map(md_premise)).collect();
                let claims: Vec<String> =
                    group.iter().flat_map(|s| s.conclusions.iter().map(md_claim)).collect();
                out.push_str(&format!(
                    "| Fail | {} | {} ⟹ {} |\n",
                    md_nodes(&nodes),
                    premises.join("<br>"),
                    claims.join("<br>")
                ));
                i = j;
                continue;
            }
            StepKind::Induction => {
                induction += 1;
                out.push_str(&format!(
                    "| Induction | X{induction} = {{{}}}, Exit(X{induction}) = {{{}}} | {} ⟹ {} |\n",
                    md_nodes(&step.component),
                    md_nodes(&step.exit),
                    step.premises.iter().map(md_premise).collect::<Vec<_>>().join("<br>"),
                    step.conclusions.iter().map(md_claim).collect::<Vec<_>>().join("<br>"),
                ));
            }
            StepKind::Successors => {
                out.push_str(&format!(
                    "| Successors | {} | {} ⟹ {} |\n",
                    md_nodes(&step.component),
                    step.premises.iter().map(md_premise).collect::<Vec<_>>().join("<br>"),
                    step.conclusions.iter().map(md_claim).collect::<Vec<_>>().join("<br>"),
                ));
            }
            StepKind::Conclusion => {
                let chain: Vec<String> = step
                    .premises
                    .iter()
                    .flat_map(|p| match p {
                        Premise::Holds { state, qs } => qs
                            .iter()
                            .map(|q| {
                                format!(
                                    "{state} ⊨ μ({q}) ⇒ {state} ⊨ {}",
                                    md_escape(&proof.property)
                                )
                            })
                            .collect(),
                        other => vec![md_premise(other)],
                    })
                    .collect();
                out.push_str(&format!(
                    "| Conclusion |  | {} ⇒ M ⊨ {} |\n",
                    chain.join("; "),
                    md_escape(&proof.property)
                ));
            }
        }
        i += 1;
    }
    out
}

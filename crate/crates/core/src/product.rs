//! Synchronous product of a Kripke structure with a Büchi automaton,
//! emptiness checking by nested depth-first search, lasso extraction and
//! strongly connected component analysis.
//!
//! An edge `<s,q> -> <s',q'>` exists iff `s -> s'` in the model and the
//! automaton has `q --g--> q'` with `g` true on the label of `s` (the
//! source state). Successors are explored in declaration order: model
//! transitions first, automaton edges second.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::automata::Buchi;
use crate::pks::Kripke;

/// A product state: model state index and automaton state index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub state: usize,
    pub q: usize,
}

/// Product node referenced by name, as it appears in documents: `<s,q>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct NodeRef {
    pub state: String,
    pub q: String,
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.state, self.q)
    }
}

impl FromStr for NodeRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .strip_prefix('<')
            .and_then(|r| r.strip_suffix('>'))
            .ok_or_else(|| format!("node reference '{s}' is not of the form <s,q>"))?;
        let (state, q) = inner
            .split_once(',')
            .ok_or_else(|| format!("node reference '{s}' is not of the form <s,q>"))?;
        Ok(NodeRef { state: state.trim().into(), q: q.trim().into() })
    }
}

impl TryFrom<String> for NodeRef {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<NodeRef> for String {
    fn from(n: NodeRef) -> String {
        n.to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProductError {
    #[error("automaton guard references atom {0} unknown to the model")]
    UnknownAtom(String),
}

/// Reachable product graph. Node indices follow the lexicographic order
/// of (model state id, automaton state id).
#[derive(Debug, Clone)]
pub struct Product<'a> {
    model: &'a Kripke,
    automaton: &'a Buchi,
    nodes: Vec<Pair>,
    index: HashMap<Pair, usize>,
    succ: Vec<Vec<usize>>,
    initial: Vec<usize>,
    materialized: Vec<bool>,
}

/// Builds the product reachable from the initial nodes.
pub fn intersect<'a>(model: &'a Kripke, automaton: &'a Buchi) -> Result<Product<'a>, ProductError> {
    let atoms: BTreeSet<&str> = model.atoms().iter().map(String::as_str).collect();
    if let Some(a) = automaton.guard_atoms().into_iter().find(|a| !atoms.contains(a.as_str())) {
        return Err(ProductError::UnknownAtom(a));
    }
    let mut roots = Vec::new();
    for &s in model.initial() {
        for &q in automaton.initial() {
            let p = Pair { state: s, q };
            if !roots.contains(&p) {
                roots.push(p);
            }
        }
    }
    let mut found: BTreeSet<Pair> = BTreeSet::new();
    let mut queue: VecDeque<Pair> = roots.iter().copied().collect();
    let mut adjacency: HashMap<Pair, Vec<Pair>> = HashMap::new();
    while let Some(p) = queue.pop_front() {
        if !found.insert(p) {
            continue;
        }
        let next = pair_successors(model, automaton, p);
        queue.extend(next.iter().copied());
        adjacency.insert(p, next);
    }
    let mut product = Product {
        model,
        automaton,
        nodes: Vec::new(),
        index: HashMap::new(),
        succ: Vec::new(),
        initial: Vec::new(),
        materialized: Vec::new(),
    };
    product.rebuild(found.into_iter().map(|p| (p, false)).collect(), &adjacency);
    product.initial = roots.iter().map(|p| product.index[p]).collect();
    Ok(product)
}

/// Product successors of any pair, reachable or not.
pub(crate) fn pair_successors(model: &Kripke, automaton: &Buchi, p: Pair) -> Vec<Pair> {
    let mut out = Vec::new();
    let label = |a: &str| model.label(p.state, a);
    for &t in model.successors(p.state) {
        for e in automaton.outgoing(p.q) {
            // atoms were checked against the model in `intersect`
            if e.guard.eval(&label).unwrap_or(false) {
                let next = Pair { state: t, q: e.to };
                if !out.contains(&next) {
                    out.push(next);
                }
            }
        }
    }
    out
}

impl<'a> Product<'a> {
    fn rebuild(&mut self, nodes: Vec<(Pair, bool)>, adjacency: &HashMap<Pair, Vec<Pair>>) {
        let mut nodes = nodes;
        let (m, a) = (self.model, self.automaton);
        nodes.sort_by(|(x, _), (y, _)| {
            (m.state_id(x.state), a.state_id(x.q)).cmp(&(m.state_id(y.state), a.state_id(y.q)))
        });
        self.index = nodes.iter().enumerate().map(|(i, (p, _))| (*p, i)).collect();
        self.materialized = nodes.iter().map(|(_, flag)| *flag).collect();
        self.nodes = nodes.into_iter().map(|(p, _)| p).collect();
        self.succ = self
            .nodes
            .iter()
            .map(|p| adjacency[p].iter().map(|n| self.index[n]).collect())
            .collect();
    }

    pub fn model(&self) -> &'a Kripke {
        self.model
    }

    pub fn automaton(&self) -> &'a Buchi {
        self.automaton
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn pair(&self, node: usize) -> Pair {
        self.nodes[node]
    }

    pub fn node_of(&self, p: Pair) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn node_ref(&self, node: usize) -> NodeRef {
        self.pair_ref(self.nodes[node])
    }

    pub fn pair_ref(&self, p: Pair) -> NodeRef {
        NodeRef {
            state: self.model.state_id(p.state).to_string(),
            q: self.automaton.state_id(p.q).to_string(),
        }
    }

    pub fn resolve(&self, r: &NodeRef) -> Option<Pair> {
        Some(Pair {
            state: self.model.state_index(&r.state)?,
            q: self.automaton.state_index(&r.q)?,
        })
    }

    pub fn successors(&self, node: usize) -> &[usize] {
        &self.succ[node]
    }

    /// Successors of an arbitrary pair, computed from the model and the
    /// automaton; agrees with [`Product::successors`] on stored nodes.
    pub fn successors_of_pair(&self, p: Pair) -> Vec<Pair> {
        pair_successors(self.model, self.automaton, p)
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn is_accepting(&self, node: usize) -> bool {
        self.automaton.is_accepting(self.nodes[node].q)
    }

    pub fn is_materialized(&self, node: usize) -> bool {
        self.materialized[node]
    }

    /// Nodes with no outgoing edge, in node order.
    pub fn fail_nodes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&n| self.succ[n].is_empty()).collect()
    }

    /// Adds, as flagged nodes, the pairs `<s',q'>` that a
    /// Successors-discharged node `<s,q>` reaches through a guard-blocked
    /// automaton transition (`s -> s'` in the model, `q -> q'` in the
    /// automaton). A candidate is kept together with its forward closure
    /// only if that closure holds no accepting cycle. Returns the number of
    /// nodes added. Emptiness searches ignore flagged nodes.
    pub fn materialize(&mut self) -> usize {
        let sccs = scc_decomposition(self);
        let mut candidates: BTreeSet<Pair> = BTreeSet::new();
        for scc in sccs.iter().filter(|c| c.trivial) {
            let n = scc.nodes[0];
            if self.materialized[n] || self.succ[n].is_empty() {
                continue;
            }
            let p = self.nodes[n];
            let label = |a: &str| self.model.label(p.state, a);
            for &t in self.model.successors(p.state) {
                for e in self.automaton.outgoing(p.q) {
                    if !e.guard.eval(&label).unwrap_or(false) {
                        let c = Pair { state: t, q: e.to };
                        if !self.index.contains_key(&c) {
                            candidates.insert(c);
                        }
                    }
                }
            }
        }
        let mut adjacency: HashMap<Pair, Vec<Pair>> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, self.succ[i].iter().map(|&j| self.nodes[j]).collect()))
            .collect();
        let mut added: BTreeSet<Pair> = BTreeSet::new();
        // sorted for determinism
        let mut ordered: Vec<Pair> = candidates.into_iter().collect();
        ordered.sort_by_key(|p| (self.model.state_id(p.state), self.automaton.state_id(p.q)));
        for c in ordered {
            if adjacency.contains_key(&c) {
                continue;
            }
            let mut closure: HashMap<Pair, Vec<Pair>> = HashMap::new();
            let mut queue = VecDeque::from([c]);
            while let Some(p) = queue.pop_front() {
                if adjacency.contains_key(&p) || closure.contains_key(&p) {
                    continue;
                }
                let next = self.successors_of_pair(p);
                queue.extend(next.iter().copied());
                closure.insert(p, next);
            }
            let graph = |p: &Pair| -> Vec<Pair> {
                closure
                    .get(p)
                    .or_else(|| adjacency.get(p))
                    .cloned()
                    .unwrap_or_default()
            };
            if has_accepting_cycle_from(c, &graph, |p| self.automaton.is_accepting(p.q)) {
                continue;
            }
            for (p, next) in closure {
                added.insert(p);
                adjacency.insert(p, next);
            }
        }
        if added.is_empty() {
            return 0;
        }
        let initial: Vec<Pair> = self.initial.iter().map(|&i| self.nodes[i]).collect();
        let nodes: Vec<(Pair, bool)> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, p)| (*p, self.materialized[i]))
            .chain(added.iter().map(|p| (*p, true)))
            .collect();
        self.rebuild(nodes, &adjacency);
        self.initial = initial.iter().map(|p| self.index[p]).collect();
        added.len()
    }

    /// Searches for an accepting lasso among unflagged nodes with nested
    /// depth-first search (iterative, inner searches seeded in post-order).
    pub fn find_accepting_lasso(&self) -> Option<Lasso> {
        let n = self.len();
        let mut outer_seen = vec![false; n];
        let mut inner_seen = vec![false; n];
        for &root in &self.initial {
            if outer_seen[root] {
                continue;
            }
            outer_seen[root] = true;
            // (node, next successor position)
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
                let succs = &self.succ[node];
                if *pos < succs.len() {
                    let next = succs[*pos];
                    *pos += 1;
                    if !outer_seen[next] && !self.materialized[next] {
                        outer_seen[next] = true;
                        stack.push((next, 0));
                    }
                    continue;
                }
                // post-order
                if self.is_accepting(node) {
                    if let Some(cycle) = self.inner_search(node, &mut inner_seen) {
                        let prefix = stack.iter().map(|&(v, _)| self.node_ref(v)).collect();
                        let cycle = cycle.into_iter().map(|v| self.node_ref(v)).collect();
                        return Some(Lasso { prefix, cycle });
                    }
                }
                stack.pop();
            }
        }
        None
    }

    // Path from a successor of `seed` back to `seed`, if one exists.
    fn inner_search(&self, seed: usize, seen: &mut [bool]) -> Option<Vec<usize>> {
        let mut stack: Vec<(usize, usize)> = vec![(seed, 0)];
        while let Some(&mut (node, ref mut pos)) = stack.last_mut() {
            let succs = &self.succ[node];
            if *pos < succs.len() {
                let next = succs[*pos];
                *pos += 1;
                if self.materialized[next] {
                    continue;
                }
                if next == seed {
                    let mut cycle: Vec<usize> = stack.iter().skip(1).map(|&(v, _)| v).collect();
                    cycle.push(seed);
                    return Some(cycle);
                }
                if !seen[next] {
                    seen[next] = true;
                    stack.push((next, 0));
                }
                continue;
            }
            stack.pop();
        }
        None
    }

    pub fn is_empty_language(&self) -> bool {
        self.find_accepting_lasso().is_none()
    }

    /// Whether the node pair `(a, b)` is an edge.
    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(&b)
    }

    /// Serializable view of the graph.
    pub fn to_document(&self) -> ProductDoc {
        ProductDoc {
            nodes: (0..self.len()).map(|n| self.node_ref(n)).collect(),
            initial: self.initial.iter().map(|&n| self.node_ref(n)).collect(),
            accepting: (0..self.len())
                .filter(|&n| self.is_accepting(n))
                .map(|n| self.node_ref(n))
                .collect(),
            materialized: (0..self.len())
                .filter(|&n| self.materialized[n])
                .map(|n| self.node_ref(n))
                .collect(),
            edges: (0..self.len())
                .flat_map(|n| self.succ[n].iter().map(move |&m| (self.node_ref(n), self.node_ref(m))))
                .collect(),
        }
    }
}

fn has_accepting_cycle_from<G, A>(start: Pair, graph: &G, accepting: A) -> bool
where
    G: Fn(&Pair) -> Vec<Pair>,
    A: Fn(&Pair) -> bool,
{
    let reach = |from: Pair| -> BTreeSet<Pair> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<Pair> = graph(&from).into();
        while let Some(p) = queue.pop_front() {
            if seen.insert(p) {
                queue.extend(graph(&p));
            }
        }
        seen
    };
    let mut region = reach(start);
    region.insert(start);
    region
        .into_iter()
        .filter(|p| accepting(p))
        .any(|p| reach(p).contains(&p))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductDoc {
    pub nodes: Vec<NodeRef>,
    pub initial: Vec<NodeRef>,
    pub accepting: Vec<NodeRef>,
    pub materialized: Vec<NodeRef>,
    pub edges: Vec<(NodeRef, NodeRef)>,
}

/// A finite stem followed by a cycle repeated forever. The stem ends in an
/// accepting node; the cycle returns to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lasso {
    pub prefix: Vec<NodeRef>,
    pub cycle: Vec<NodeRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LassoDefect {
    #[error("empty cycle")]
    EmptyCycle,
    #[error("empty prefix")]
    EmptyPrefix,
    #[error("node {0} does not belong to the product")]
    UnknownNode(NodeRef),
    #[error("prefix does not start at an initial node")]
    NotInitial,
    #[error("no edge {0} -> {1}")]
    MissingEdge(NodeRef, NodeRef),
    #[error("cycle has no accepting node")]
    NoAccepting,
}

impl Lasso {
    /// Checks the lasso against `product`: starts at an initial node, every
    /// consecutive pair is an edge, the cycle closes and is accepting.
    pub fn validate(&self, product: &Product) -> Result<(), LassoDefect> {
        if self.prefix.is_empty() {
            return Err(LassoDefect::EmptyPrefix);
        }
        if self.cycle.is_empty() {
            return Err(LassoDefect::EmptyCycle);
        }
        let resolve = |r: &NodeRef| {
            product
                .resolve(r)
                .and_then(|p| product.node_of(p))
                .ok_or_else(|| LassoDefect::UnknownNode(r.clone()))
        };
        let prefix: Vec<usize> = self.prefix.iter().map(resolve).collect::<Result<_, _>>()?;
        let cycle: Vec<usize> = self.cycle.iter().map(resolve).collect::<Result<_, _>>()?;
        if !product.initial().contains(&prefix[0]) {
            return Err(LassoDefect::NotInitial);
        }
        let path: Vec<usize> = prefix.iter().chain(cycle.iter()).copied().chain([cycle[0]]).collect();
        for w in path.windows(2) {
            if !product.has_edge(w[0], w[1]) {
                return Err(LassoDefect::MissingEdge(product.node_ref(w[0]), product.node_ref(w[1])));
            }
        }
        if !cycle.iter().any(|&n| product.is_accepting(n)) {
            return Err(LassoDefect::NoAccepting);
        }
        Ok(())
    }

    /// Shortest equivalent (prefix, cycle) presentation of the node word.
    pub fn canonical_trace(&self) -> (Vec<NodeRef>, Vec<NodeRef>) {
        canonical(self.prefix.clone(), self.cycle.clone())
    }

    /// Projection onto model states, canonicalized.
    pub fn model_projection(&self) -> (Vec<String>, Vec<String>) {
        let states = |v: &[NodeRef]| v.iter().map(|n| n.state.clone()).collect::<Vec<_>>();
        canonical(states(&self.prefix), states(&self.cycle))
    }

    /// e.g. `s0, s2, s5, (s7)^ω`
    pub fn model_path_text(&self) -> String {
        let (prefix, cycle) = self.model_projection();
        render_lasso(&prefix, &cycle)
    }

    pub fn trace_text(&self) -> String {
        let (prefix, cycle) = self.canonical_trace();
        let show = |v: &[NodeRef]| v.iter().map(|n| n.to_string()).collect::<Vec<_>>();
        render_lasso(&show(&prefix), &show(&cycle))
    }
}

fn render_lasso(prefix: &[String], cycle: &[String]) -> String {
    let mut parts: Vec<String> = prefix.to_vec();
    parts.push(format!("({})^ω", cycle.join(", ")));
    parts.join(", ")
}

/// Reduces the cycle to its primitive root and folds trailing prefix
/// elements into the cycle by rotation.
fn canonical<T: Clone + PartialEq>(mut prefix: Vec<T>, mut cycle: Vec<T>) -> (Vec<T>, Vec<T>) {
    let n = cycle.len();
    if let Some(root) = (1..=n).find(|&d| n.is_multiple_of(d) && (0..n).all(|i| cycle[i] == cycle[i % d])) {
        cycle.truncate(root);
    }
    while let (Some(p), Some(c)) = (prefix.last(), cycle.last()) {
        if p != c {
            break;
        }
        prefix.pop();
        cycle.rotate_right(1);
    }
    (prefix, cycle)
}

/// A strongly connected component. `trivial` marks a single node without
/// a self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scc {
    pub nodes: Vec<usize>,
    pub trivial: bool,
}

/// Tarjan's algorithm (iterative). Components come out in reverse
/// topological order of the condensation: every edge leaving a component
/// points to one listed earlier.
pub fn scc_decomposition(product: &Product) -> Vec<Scc> {
    let n = product.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut on_stack = vec![false; n];
    let mut stack: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    let mut counter = 0usize;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            let succs = product.successors(v);
            if *pos < succs.len() {
                let w = succs[*pos];
                *pos += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut nodes = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack");
                    on_stack[w] = false;
                    nodes.push(w);
                    if w == v {
                        break;
                    }
                }
                nodes.sort_unstable();
                let trivial = nodes.len() == 1 && !product.has_edge(nodes[0], nodes[0]);
                out.push(Scc { nodes, trivial });
            }
        }
    }
    out
}

/// Breadth-first distance of every node from the initial nodes, following
/// stored edges; nodes not reached get `None`.
pub fn bfs_depths(product: &Product) -> Vec<Option<usize>> {
    let mut depth = vec![None; product.len()];
    let mut queue = VecDeque::new();
    for &i in product.initial() {
        if depth[i].is_none() {
            depth[i] = Some(0);
            queue.push_back(i);
        }
    }
    while let Some(v) = queue.pop_front() {
        let d = depth[v].expect("queued nodes have a depth");
        for &w in product.successors(v) {
            if depth[w].is_none() {
                depth[w] = Some(d + 1);
                queue.push_back(w);
            }
        }
    }
    depth
}

/// Groups nodes by model state, e.g. for rendering.
pub fn by_model_state(product: &Product, nodes: &[usize]) -> BTreeMap<String, Vec<String>> {
    let mut out: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for &n in nodes {
        let r = product.node_ref(n);
        out.entry(r.state).or_default().push(r.q);
    }
    out
}

//! Regular first-order terms stored as a minimal, hash-consed graph.
//!
//! Every [`TermId`] handed out by a [`TermStore`] names a node of one global
//! graph in which no two nodes unfold to the same (possibly infinite) tree.
//! Equality of ids is therefore equality of terms, cyclic ones included.

mod graph;
mod subst;
mod syntax;

use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use thiserror::Error;

pub use graph::{RawGraph, RawLabel, RawNode, RawRef};
pub use subst::Substitution;
pub use syntax::{parse_term_graph, NamedRoots};

/// Index of a nonterminal in a [`Signature`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NontermId(pub u32);

impl NontermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Canonical handle of a regular term inside one [`TermStore`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermId(u32);

impl TermId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TermError {
    #[error("nonterminal `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("variable index must be at least 1")]
    VariableZero,
    #[error("variable node x{0} cannot have successors")]
    VariableWithSuccessors(u32),
    #[error("reference to undefined node `{0}`")]
    DanglingReference(String),
    #[error("node `{0}` defined twice")]
    DuplicateNode(String),
    #[error("term is infinite (cyclic presentation); height is undefined")]
    Cyclic,
    #[error("syntax error at {line}:{column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
}

/// Ranked alphabet of nonterminals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    names: Vec<String>,
    arities: Vec<usize>,
    by_name: HashMap<String, NontermId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a nonterminal; returns `None` if the name is taken.
    pub fn add(&mut self, name: &str, arity: usize) -> Option<NontermId> {
        if self.by_name.contains_key(name) {
            return None;
        }
        let id = NontermId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.arities.push(arity);
        self.by_name.insert(name.to_string(), id);
        Some(id)
    }

    pub fn lookup(&self, name: &str) -> Option<NontermId> {
        self.by_name.get(name).copied()
    }

    pub fn name(&self, id: NontermId) -> &str {
        &self.names[id.index()]
    }

    pub fn arity(&self, id: NontermId) -> usize {
        self.arities[id.index()]
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NontermId> {
        (0..self.names.len() as u32).map(NontermId)
    }

    pub fn max_arity(&self) -> usize {
        self.arities.iter().copied().max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TermNode {
    Var(u32),
    App(NontermId, Box<[TermId]>),
}

impl TermNode {
    pub fn children(&self) -> &[TermId] {
        match self {
            TermNode::Var(_) => &[],
            TermNode::App(_, cs) => cs,
        }
    }
}

#[derive(Clone, Copy, Debug)]
struct NodeMeta {
    finite: bool,
    height: u32,
}

/// Reference inside a canonical key of a strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum KeyRef {
    Local(u32),
    Ext(TermId),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum KeyLabel {
    Var(u32),
    App(NontermId),
}

type CycleKey = Vec<(KeyLabel, Vec<KeyRef>)>;

/// Append-only store of canonical term nodes.
///
/// Mutation needs `&mut self`; shared references can be read from many
/// threads at once. Cloning yields an independent store in which all
/// previously issued ids stay valid.
#[derive(Clone, Debug)]
pub struct TermStore {
    sig: Arc<Signature>,
    nodes: Vec<TermNode>,
    meta: Vec<NodeMeta>,
    cons: HashMap<TermNode, TermId>,
    cycles: HashMap<CycleKey, TermId>,
}

impl TermStore {
    pub fn new(sig: Arc<Signature>) -> Self {
        TermStore {
            sig,
            nodes: Vec::new(),
            meta: Vec::new(),
            cons: HashMap::new(),
            cycles: HashMap::new(),
        }
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn node(&self, t: TermId) -> &TermNode {
        &self.nodes[t.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_var(&self, t: TermId) -> Option<u32> {
        match self.node(t) {
            TermNode::Var(i) => Some(*i),
            TermNode::App(..) => None,
        }
    }

    pub fn root(&self, t: TermId) -> Option<NontermId> {
        match self.node(t) {
            TermNode::Var(_) => None,
            TermNode::App(f, _) => Some(*f),
        }
    }

    pub fn children(&self, t: TermId) -> &[TermId] {
        self.node(t).children()
    }

    pub fn is_finite(&self, t: TermId) -> bool {
        self.meta[t.index()].finite
    }

    /// The variable term `x_i`. Panics on `i = 0`.
    pub fn var(&mut self, i: u32) -> TermId {
        assert!(i >= 1, "variables are numbered from 1");
        self.insert_acyclic(TermNode::Var(i))
    }

    /// The existing id of `x_i`, if that variable was ever interned.
    pub fn lookup_var(&self, i: u32) -> Option<TermId> {
        self.cons.get(&TermNode::Var(i)).copied()
    }

    pub fn app(&mut self, f: NontermId, children: &[TermId]) -> Result<TermId, TermError> {
        let arity = self.sig.arity(f);
        if arity != children.len() {
            return Err(TermError::ArityMismatch {
                name: self.sig.name(f).to_string(),
                expected: arity,
                found: children.len(),
            });
        }
        Ok(self.app_unchecked(f, children))
    }

    pub(crate) fn app_unchecked(&mut self, f: NontermId, children: &[TermId]) -> TermId {
        self.insert_acyclic(TermNode::App(f, children.into()))
    }

    /// `A(x1,...,xm)` for a nonterminal `A` of arity `m`.
    pub fn abstract_lhs(&mut self, f: NontermId) -> TermId {
        let m = self.sig.arity(f) as u32;
        let vars: Vec<TermId> = (1..=m).map(|i| self.var(i)).collect();
        self.app_unchecked(f, &vars)
    }

    // Children are canonical, so plain hash-consing yields a canonical node.
    fn insert_acyclic(&mut self, node: TermNode) -> TermId {
        if let Some(&id) = self.cons.get(&node) {
            return id;
        }
        let (finite, height) = match &node {
            TermNode::Var(_) => (true, 0),
            TermNode::App(_, cs) => {
                let mut finite = true;
                let mut h = 0;
                for c in cs.iter() {
                    let m = self.meta[c.index()];
                    finite &= m.finite;
                    h = h.max(m.height + 1);
                }
                (finite, if finite { h } else { 0 })
            }
        };
        let id = TermId(self.nodes.len() as u32);
        self.nodes.push(node.clone());
        self.meta.push(NodeMeta { finite, height });
        self.cons.insert(node, id);
        id
    }

    /// Nodes reachable from `roots`, in depth-first discovery order.
    pub fn reachable(&self, roots: &[TermId]) -> Vec<TermId> {
        let mut seen = std::collections::HashSet::new();
        let mut order = Vec::new();
        let mut stack: Vec<TermId> = roots.iter().rev().copied().collect();
        while let Some(t) = stack.pop() {
            if !seen.insert(t) {
                continue;
            }
            order.push(t);
            for &c in self.children(t).iter().rev() {
                if !seen.contains(&c) {
                    stack.push(c);
                }
            }
        }
        order
    }

    /// Number of distinct subterms of the given terms (size of their least presentation).
    pub fn pressize(&self, roots: &[TermId]) -> usize {
        self.reachable(roots).len()
    }

    /// Number of nonterminal-rooted distinct subterms.
    pub fn propsize(&self, roots: &[TermId]) -> usize {
        self.reachable(roots)
            .into_iter()
            .filter(|&t| self.is_var(t).is_none())
            .count()
    }

    pub fn height(&self, t: TermId) -> Result<u32, TermError> {
        let m = self.meta[t.index()];
        if m.finite {
            Ok(m.height)
        } else {
            Err(TermError::Cyclic)
        }
    }

    pub fn varin(&self, roots: &[TermId]) -> BTreeSet<u32> {
        self.reachable(roots)
            .into_iter()
            .filter_map(|t| self.is_var(t))
            .collect()
    }

    /// Distinct subterms of the given terms.
    pub fn subterms(&self, roots: &[TermId]) -> std::collections::HashSet<TermId> {
        self.reachable(roots).into_iter().collect()
    }

    pub fn apply(&mut self, t: TermId, sigma: &Substitution) -> TermId {
        if sigma.is_empty() {
            return t;
        }
        if self.is_finite(t) {
            let mut memo = HashMap::new();
            self.apply_finite(t, sigma, &mut memo)
        } else {
            let nodes = self.reachable(&[t]);
            let index: HashMap<TermId, usize> =
                nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
            let mut raw = RawGraph::default();
            for &n in &nodes {
                let node = match self.node(n) {
                    TermNode::Var(i) => match sigma.get(*i) {
                        Some(img) => RawNode::alias(img),
                        None => RawNode::var(*i),
                    },
                    TermNode::App(f, cs) => RawNode::app(
                        *f,
                        cs.iter().map(|c| RawRef::Node(index[c])).collect(),
                    ),
                };
                raw.nodes.push(node);
            }
            raw.roots.push(0);
            self.intern_graph(&raw).expect("well-formed by construction")[0]
        }
    }

    fn apply_finite(
        &mut self,
        t: TermId,
        sigma: &Substitution,
        memo: &mut HashMap<TermId, TermId>,
    ) -> TermId {
        if let Some(&r) = memo.get(&t) {
            return r;
        }
        let r = match self.node(t).clone() {
            TermNode::Var(i) => sigma.get(i).unwrap_or(t),
            TermNode::App(f, cs) => {
                let new: Vec<TermId> = cs
                    .iter()
                    .map(|&c| self.apply_finite(c, sigma, memo))
                    .collect();
                self.app_unchecked(f, &new)
            }
        };
        memo.insert(t, r);
        r
    }

    /// The term `H σ^ω` for `σ = [x_i / H]`: arcs into `x_i` are redirected to the root.
    pub fn omega_iterate(&mut self, h: TermId, i: u32) -> TermId {
        if self.is_var(h) == Some(i) || !self.varin(&[h]).contains(&i) {
            return h;
        }
        let nodes = self.reachable(&[h]);
        let index: HashMap<TermId, usize> =
            nodes.iter().enumerate().map(|(k, &n)| (n, k)).collect();
        let mut raw = RawGraph::default();
        for &n in &nodes {
            let node = match self.node(n) {
                TermNode::Var(j) => RawNode::var(*j),
                TermNode::App(f, cs) => RawNode::app(
                    *f,
                    cs.iter()
                        .map(|c| {
                            if self.is_var(*c) == Some(i) {
                                RawRef::Node(0)
                            } else {
                                RawRef::Node(index[c])
                            }
                        })
                        .collect(),
                ),
            };
            raw.nodes.push(node);
        }
        raw.roots.push(0);
        self.intern_graph(&raw).expect("well-formed by construction")[0]
    }

    /// Renders a term in inline syntax; nodes on cycles are labelled `@k=` once
    /// and referenced as `@k` afterwards.
    pub fn display(&self, t: TermId) -> String {
        syntax::display(self, t)
    }

    /// Parses a term in inline syntax, e.g. `A(D(x5,C(x2,B)),x5,B)`.
    pub fn parse(&mut self, text: &str) -> Result<TermId, TermError> {
        syntax::parse_inline(self, text)
    }

    /// Renders terms in the line-based graph format, one `node` line per subterm.
    pub fn to_graph_text(&self, roots: &[(&str, TermId)]) -> String {
        syntax::to_graph_text(self, roots)
    }
}

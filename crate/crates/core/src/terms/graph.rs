//! Interning of arbitrary (possibly cyclic) term graphs.
//!
//! The incoming graph is merged with the part of the store it touches and
//! minimised by Moore-style partition refinement. Classes that are still new
//! afterwards are grouped into strongly connected components; each cyclic
//! component gets a breadth-first canonical key, so a component isomorphic to
//! one already stored (but not reachable from the input) is found again.

use std::collections::{HashMap, VecDeque};

use super::{CycleKey, KeyLabel, KeyRef, NodeMeta, NontermId, TermError, TermId, TermNode, TermStore};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RawLabel {
    Var(u32),
    App(NontermId),
    /// Stands for an already interned term; must have no children.
    Existing(TermId),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RawRef {
    Node(usize),
    Term(TermId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawNode {
    pub label: RawLabel,
    pub children: Vec<RawRef>,
}

impl RawNode {
    pub fn var(i: u32) -> Self {
        RawNode {
            label: RawLabel::Var(i),
            children: Vec::new(),
        }
    }

    pub fn app(f: NontermId, children: Vec<RawRef>) -> Self {
        RawNode {
            label: RawLabel::App(f),
            children,
        }
    }

    pub fn alias(t: TermId) -> Self {
        RawNode {
            label: RawLabel::Existing(t),
            children: Vec::new(),
        }
    }
}

/// Term graph under construction: nodes may point at each other or at stored terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawGraph {
    pub nodes: Vec<RawNode>,
    pub roots: Vec<usize>,
}

impl TermStore {
    /// Interns every node of `g` and returns the canonical ids of its roots.
    pub fn intern_graph(&mut self, g: &RawGraph) -> Result<Vec<TermId>, TermError> {
        self.validate_raw(g)?;
        // Resolve aliases so that only Var/App nodes remain as real nodes.
        let resolve = |r: RawRef| -> RawRef {
            match r {
                RawRef::Node(k) => match g.nodes[k].label {
                    RawLabel::Existing(t) => RawRef::Term(t),
                    _ => r,
                },
                t => t,
            }
        };
        let children: Vec<Vec<RawRef>> = g
            .nodes
            .iter()
            .map(|n| n.children.iter().map(|&r| resolve(r)).collect())
            .collect();

        let ids = match topo_order(g, &children) {
            Some(order) => self.intern_acyclic(g, &children, &order),
            None => self.intern_cyclic(g, &children),
        };
        Ok(g.roots.iter().map(|&r| ids[r]).collect())
    }

    fn validate_raw(&self, g: &RawGraph) -> Result<(), TermError> {
        for node in &g.nodes {
            match node.label {
                RawLabel::Var(i) => {
                    if i == 0 {
                        return Err(TermError::VariableZero);
                    }
                    if !node.children.is_empty() {
                        return Err(TermError::VariableWithSuccessors(i));
                    }
                }
                RawLabel::Existing(t) => {
                    if t.index() >= self.nodes.len() {
                        return Err(TermError::DanglingReference(format!("term #{}", t.0)));
                    }
                    if !node.children.is_empty() {
                        return Err(TermError::DanglingReference(
                            "alias node with successors".into(),
                        ));
                    }
                }
                RawLabel::App(f) => {
                    if f.index() >= self.sig.len() {
                        return Err(TermError::UnknownNonterminal(format!("#{}", f.0)));
                    }
                    let expected = self.sig.arity(f);
                    if expected != node.children.len() {
                        return Err(TermError::ArityMismatch {
                            name: self.sig.name(f).to_string(),
                            expected,
                            found: node.children.len(),
                        });
                    }
                }
            }
            for r in &node.children {
                match *r {
                    RawRef::Node(k) if k >= g.nodes.len() => {
                        return Err(TermError::DanglingReference(format!("node #{k}")))
                    }
                    RawRef::Term(t) if t.index() >= self.nodes.len() => {
                        return Err(TermError::DanglingReference(format!("term #{}", t.0)))
                    }
                    _ => {}
                }
            }
        }
        for &r in &g.roots {
            if r >= g.nodes.len() {
                return Err(TermError::DanglingReference(format!("root #{r}")));
            }
        }
        Ok(())
    }

    fn intern_acyclic(
        &mut self,
        g: &RawGraph,
        children: &[Vec<RawRef>],
        order: &[usize],
    ) -> Vec<TermId> {
        let mut ids: Vec<Option<TermId>> = vec![None; g.nodes.len()];
        for &k in order {
            let id = match g.nodes[k].label {
                RawLabel::Var(i) => self.var(i),
                RawLabel::Existing(t) => t,
                RawLabel::App(f) => {
                    let cs: Vec<TermId> = children[k]
                        .iter()
                        .map(|r| match *r {
                            RawRef::Node(c) => ids[c].expect("children first"),
                            RawRef::Term(t) => t,
                        })
                        .collect();
                    self.app_unchecked(f, &cs)
                }
            };
            ids[k] = Some(id);
        }
        ids.into_iter().map(|x| x.expect("all visited")).collect()
    }

    fn intern_cyclic(&mut self, g: &RawGraph, children: &[Vec<RawRef>]) -> Vec<TermId> {
        // Universe: raw nodes first, then stored nodes reachable from the graph.
        let raw_count = g.nodes.len();
        let ext_roots: Vec<TermId> = children
            .iter()
            .flatten()
            .filter_map(|r| match r {
                RawRef::Term(t) => Some(*t),
                _ => None,
            })
            .chain(g.nodes.iter().filter_map(|n| match n.label {
                RawLabel::Existing(t) => Some(t),
                _ => None,
            }))
            .collect();
        let stored = self.reachable(&ext_roots);
        let stored_index: HashMap<TermId, usize> = stored
            .iter()
            .enumerate()
            .map(|(k, &t)| (t, raw_count + k))
            .collect();
        let total = raw_count + stored.len();
        let mut labels: Vec<KeyLabel> = Vec::with_capacity(total);
        let mut succ: Vec<Vec<usize>> = Vec::with_capacity(total);
        for (k, node) in g.nodes.iter().enumerate() {
            match node.label {
                RawLabel::Var(i) => labels.push(KeyLabel::Var(i)),
                RawLabel::App(f) => labels.push(KeyLabel::App(f)),
                // Aliases are placeholders; give them the label of their target
                // and point them at it so refinement merges the two.
                RawLabel::Existing(t) => labels.push(match self.node(t) {
                    TermNode::Var(i) => KeyLabel::Var(*i),
                    TermNode::App(f, _) => KeyLabel::App(*f),
                }),
            }
            let cs = match node.label {
                RawLabel::Existing(t) => self
                    .children(t)
                    .iter()
                    .map(|c| stored_index[c])
                    .collect(),
                _ => children[k]
                    .iter()
                    .map(|r| match *r {
                        RawRef::Node(c) => c,
                        RawRef::Term(t) => stored_index[&t],
                    })
                    .collect(),
            };
            succ.push(cs);
        }
        for &t in &stored {
            labels.push(match self.node(t) {
                TermNode::Var(i) => KeyLabel::Var(*i),
                TermNode::App(f, _) => KeyLabel::App(*f),
            });
            succ.push(self.children(t).iter().map(|c| stored_index[c]).collect());
        }

        let class = refine(&labels, &succ);
        let class_count = class.iter().copied().max().map_or(0, |m| m + 1);
        let mut resolved: Vec<Option<TermId>> = vec![None; class_count];
        for (k, &t) in stored.iter().enumerate() {
            resolved[class[raw_count + k]] = Some(t);
        }
        let mut rep: Vec<Option<usize>> = vec![None; class_count];
        for u in 0..total {
            rep[class[u]].get_or_insert(u);
        }
        // Quotient graph on still-unresolved classes.
        let pending: Vec<usize> = (0..class_count).filter(|&c| resolved[c].is_none()).collect();
        let qsucc = |c: usize| -> Vec<usize> {
            let u = rep[c].expect("nonempty class");
            succ[u].iter().map(|&v| class[v]).collect()
        };
        let sccs = tarjan(&pending, |c| {
            qsucc(c)
                .into_iter()
                .filter(|&d| resolved[d].is_none())
                .collect()
        });
        for comp in sccs {
            let self_loop = comp.len() == 1 && qsucc(comp[0]).contains(&comp[0]);
            if comp.len() == 1 && !self_loop {
                let c = comp[0];
                let u = rep[c].expect("nonempty class");
                let id = match labels[u] {
                    KeyLabel::Var(i) => self.var(i),
                    KeyLabel::App(f) => {
                        let cs: Vec<TermId> = qsucc(c)
                            .into_iter()
                            .map(|d| resolved[d].expect("children resolved first"))
                            .collect();
                        self.app_unchecked(f, &cs)
                    }
                };
                resolved[c] = Some(id);
                continue;
            }
            let in_comp: std::collections::HashSet<usize> = comp.iter().copied().collect();
            let describe = |c: usize| -> (KeyLabel, Vec<Result<usize, TermId>>) {
                let u = rep[c].expect("nonempty class");
                let refs = qsucc(c)
                    .into_iter()
                    .map(|d| {
                        if in_comp.contains(&d) {
                            Ok(d)
                        } else {
                            Err(resolved[d].expect("children resolved first"))
                        }
                    })
                    .collect();
                (labels[u].clone(), refs)
            };
            let (key, order) = bfs_key(comp[0], describe);
            let ids = if let Some(&found) = self.cycles.get(&key) {
                self.follow_key(found, &key)
            } else {
                self.create_component(&key)
            };
            for (c, id) in order.into_iter().zip(ids) {
                resolved[c] = Some(id);
            }
        }
        (0..raw_count)
            .map(|k| resolved[class[k]].expect("every class resolved"))
            .collect()
    }

    /// Walks a stored component along `key`, returning ids in key order.
    fn follow_key(&self, start: TermId, key: &CycleKey) -> Vec<TermId> {
        let mut ids = vec![start];
        let mut k = 0;
        while k < ids.len() {
            let node = ids[k];
            for (pos, r) in key[k].1.iter().enumerate() {
                if let KeyRef::Local(l) = r {
                    if *l as usize == ids.len() {
                        ids.push(self.children(node)[pos]);
                    }
                }
            }
            k += 1;
        }
        ids
    }

    fn create_component(&mut self, key: &CycleKey) -> Vec<TermId> {
        let base = self.nodes.len() as u32;
        let ids: Vec<TermId> = (0..key.len() as u32).map(|k| TermId(base + k)).collect();
        for (label, refs) in key {
            let node = match label {
                KeyLabel::Var(i) => TermNode::Var(*i),
                KeyLabel::App(f) => TermNode::App(
                    *f,
                    refs.iter()
                        .map(|r| match r {
                            KeyRef::Local(l) => ids[*l as usize],
                            KeyRef::Ext(t) => *t,
                        })
                        .collect(),
                ),
            };
            self.cons.insert(node.clone(), TermId(self.nodes.len() as u32));
            self.nodes.push(node);
            self.meta.push(NodeMeta {
                finite: false,
                height: 0,
            });
        }
        let members: std::collections::HashSet<TermId> = ids.iter().copied().collect();
        for &id in &ids {
            let describe = |t: TermId| -> (KeyLabel, Vec<Result<TermId, TermId>>) {
                match self.node(t) {
                    TermNode::Var(i) => (KeyLabel::Var(*i), Vec::new()),
                    TermNode::App(f, cs) => (
                        KeyLabel::App(*f),
                        cs.iter()
                            .map(|&c| if members.contains(&c) { Ok(c) } else { Err(c) })
                            .collect(),
                    ),
                }
            };
            let (k, _) = bfs_key(id, describe);
            self.cycles.insert(k, id);
        }
        ids
    }
}

/// Breadth-first canonical description of a component seen from `start`.
/// `describe` returns the label and, per child, `Ok(member)` or `Err(outside term)`.
fn bfs_key<N, F>(start: N, describe: F) -> (CycleKey, Vec<N>)
where
    N: Copy + Eq + std::hash::Hash,
    F: Fn(N) -> (KeyLabel, Vec<Result<N, TermId>>),
{
    let mut number: HashMap<N, u32> = HashMap::new();
    let mut order = vec![start];
    number.insert(start, 0);
    let mut queue = VecDeque::from([start]);
    let mut key = Vec::new();
    while let Some(n) = queue.pop_front() {
        let (label, refs) = describe(n);
        let mut out = Vec::with_capacity(refs.len());
        for r in refs {
            match r {
                Ok(m) => {
                    let next = number.len() as u32;
                    let l = *number.entry(m).or_insert_with(|| {
                        order.push(m);
                        queue.push_back(m);
                        next
                    });
                    out.push(KeyRef::Local(l));
                }
                Err(t) => out.push(KeyRef::Ext(t)),
            }
        }
        key.push((label, out));
    }
    (key, order)
}

/// Coarsest partition compatible with labels and ordered successors.
fn refine(labels: &[KeyLabel], succ: &[Vec<usize>]) -> Vec<usize> {
    let mut ids: HashMap<&KeyLabel, usize> = HashMap::new();
    let mut class: Vec<usize> = labels
        .iter()
        .map(|l| {
            let n = ids.len();
            *ids.entry(l).or_insert(n)
        })
        .collect();
    let mut count = ids.len();
    loop {
        let mut sigs: HashMap<(usize, Vec<usize>), usize> = HashMap::new();
        let next: Vec<usize> = (0..labels.len())
            .map(|u| {
                let sig = (class[u], succ[u].iter().map(|&v| class[v]).collect());
                let n = sigs.len();
                *sigs.entry(sig).or_insert(n)
            })
            .collect();
        let new_count = sigs.len();
        class = next;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Strongly connected components, each emitted after every component it reaches.
fn tarjan<F>(nodes: &[usize], succ: F) -> Vec<Vec<usize>>
where
    F: Fn(usize) -> Vec<usize>,
{
    struct State {
        index: HashMap<usize, usize>,
        low: HashMap<usize, usize>,
        stack: Vec<usize>,
        on_stack: std::collections::HashSet<usize>,
        out: Vec<Vec<usize>>,
    }
    fn visit<F: Fn(usize) -> Vec<usize>>(v: usize, st: &mut State, succ: &F) {
        let i = st.index.len();
        st.index.insert(v, i);
        st.low.insert(v, i);
        st.stack.push(v);
        st.on_stack.insert(v);
        for w in succ(v) {
            if !st.index.contains_key(&w) {
                visit(w, st, succ);
                let lw = st.low[&w];
                let lv = st.low.get_mut(&v).expect("visited");
                *lv = (*lv).min(lw);
            } else if st.on_stack.contains(&w) {
                let iw = st.index[&w];
                let lv = st.low.get_mut(&v).expect("visited");
                *lv = (*lv).min(iw);
            }
        }
        if st.low[&v] == st.index[&v] {
            let mut comp = Vec::new();
            loop {
                let w = st.stack.pop().expect("nonempty");
                st.on_stack.remove(&w);
                comp.push(w);
                if w == v {
                    break;
                }
            }
            st.out.push(comp);
        }
    }
    let mut st = State {
        index: HashMap::new(),
        low: HashMap::new(),
        stack: Vec::new(),
        on_stack: Default::default(),
        out: Vec::new(),
    };
    for &v in nodes {
        if !st.index.contains_key(&v) {
            visit(v, &mut st, &succ);
        }
    }
    st.out
}

/// Post-order of raw nodes if they form no cycle among themselves.
fn topo_order(g: &RawGraph, children: &[Vec<RawRef>]) -> Option<Vec<usize>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = g.nodes.len();
    let mut mark = vec![Mark::New; n];
    let mut order = Vec::with_capacity(n);
    for start in 0..n {
        if mark[start] != Mark::New {
            continue;
        }
        let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
        mark[start] = Mark::Open;
        while let Some(top) = stack.len().checked_sub(1) {
            let (v, pos) = stack[top];
            let kids = &children[v];
            if pos < kids.len() {
                stack[top].1 += 1;
                if let RawRef::Node(c) = kids[pos] {
                    match mark[c] {
                        Mark::Open => return None,
                        Mark::New => {
                            mark[c] = Mark::Open;
                            stack.push((c, 0));
                        }
                        Mark::Done => {}
                    }
                }
            } else {
                mark[v] = Mark::Done;
                order.push(v);
                stack.pop();
            }
        }
    }
    Some(order)
}

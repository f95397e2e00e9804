//! Tree-level oracles shared by the integration tests. They rewrite plain
//! trees directly and never go through the term store or the LTS module.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashSet, VecDeque};

use fogbisim::grammar::{ActionId, Grammar, Rhs, RuleId};
use fogbisim::terms::{TermId, TermStore};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Var(u32),
    App(u32, Vec<Tree>),
}

impl Tree {
    pub fn from_rhs(r: &Rhs) -> Tree {
        match r {
            Rhs::Var(i) => Tree::Var(*i),
            Rhs::App(f, args) => Tree::App(f.0, args.iter().map(Tree::from_rhs).collect()),
        }
    }

    /// Reads a finite stored term.
    pub fn from_store(store: &TermStore, t: TermId) -> Tree {
        match store.is_var(t) {
            Some(i) => Tree::Var(i),
            None => Tree::App(
                store.root(t).expect("not a variable").0,
                store.children(t).iter().map(|&c| Tree::from_store(store, c)).collect(),
            ),
        }
    }

    pub fn abstract_lhs(f: u32, arity: usize) -> Tree {
        Tree::App(f, (1..=arity as u32).map(Tree::Var).collect())
    }

    fn subst(&self, args: &[Tree]) -> Tree {
        match self {
            Tree::Var(i) => args[*i as usize - 1].clone(),
            Tree::App(f, cs) => Tree::App(*f, cs.iter().map(|c| c.subst(args)).collect()),
        }
    }

    pub fn contains_var(&self, i: u32) -> bool {
        match self {
            Tree::Var(j) => *j == i,
            Tree::App(_, cs) => cs.iter().any(|c| c.contains_var(i)),
        }
    }

    pub fn text(&self, g: &Grammar) -> String {
        match self {
            Tree::Var(i) => format!("x{i}"),
            Tree::App(f, cs) => {
                let name = g.signature().name(fogbisim::terms::NontermId(*f));
                if cs.is_empty() {
                    name.to_string()
                } else {
                    let kids: Vec<String> = cs.iter().map(|c| c.text(g)).collect();
                    format!("{name}({})", kids.join(","))
                }
            }
        }
    }
}

/// One root-rewriting step by rule `r`.
pub fn step(g: &Grammar, t: &Tree, r: RuleId) -> Option<Tree> {
    let rule = &g.rules()[r.0 as usize];
    match t {
        Tree::App(f, args) if *f == rule.lhs.0 => Some(Tree::from_rhs(&rule.rhs).subst(args)),
        _ => None,
    }
}

pub fn run(g: &Grammar, t: &Tree, w: &[RuleId]) -> Option<Tree> {
    w.iter().try_fold(t.clone(), |cur, &r| step(g, &cur, r))
}

/// Shortest, then lexicographically least, rule word taking `F(x1..xm)` to
/// `x_i`, searched breadth-first up to `max_len`.
pub fn bfs_sink_word(g: &Grammar, f: u32, i: u32, max_len: usize) -> Option<Vec<RuleId>> {
    let live = exposable(g);
    let arity = g.signature().arity(fogbisim::terms::NontermId(f));
    let start = Tree::abstract_lhs(f, arity).collapse(i);
    if !start.reaches(i, &live) {
        return None;
    }
    let mut seen = HashSet::from([start.clone()]);
    let mut frontier = VecDeque::from([(start, Vec::new())]);
    while let Some((t, w)) = frontier.pop_front() {
        if t == Tree::Var(i) {
            return Some(w);
        }
        if w.len() == max_len {
            continue;
        }
        let left = max_len - w.len() - 1;
        for k in 0..g.rules().len() {
            let r = RuleId(k as u32);
            if let Some(next) = step(g, &t, r) {
                let next = next.collapse(i);
                // Root rewriting lifts x_i by at most one level per step.
                let near = next.depth_of(i).is_some_and(|d| d as usize <= left);
                if near && next.reaches(i, &live) && seen.insert(next.clone()) {
                    let mut w2 = w.clone();
                    w2.push(r);
                    frontier.push_back((next, w2));
                }
            }
        }
    }
    None
}

/// Pairs `(B,j)` such that some run from `B(x1..xk)` ends in `x_j`, as a
/// least fixpoint: a rule for `B` has `x_j` on a path whose every step is
/// already known to be exposable. Before a subterm of a child can surface,
/// the child itself must stand at the root, which gives the step rule.
pub fn exposable(g: &Grammar) -> HashSet<(u32, u32)> {
    let mut live = HashSet::new();
    loop {
        let before = live.len();
        for r in g.rules() {
            let rhs = Tree::from_rhs(&r.rhs);
            for j in 1..=g.signature().arity(r.lhs) as u32 {
                if rhs.reaches(j, &live) {
                    live.insert((r.lhs.0, j));
                }
            }
        }
        if live.len() == before {
            return live;
        }
    }
}

impl Tree {
    /// Replaces every subtree without `x_i` by `x0`. Such a subtree only
    /// ever reaches the root as a whole state without `x_i`, so sink
    /// searches cannot tell the difference.
    pub fn collapse(&self, i: u32) -> Tree {
        if !self.contains_var(i) {
            return Tree::Var(0);
        }
        match self {
            Tree::Var(_) => self.clone(),
            Tree::App(f, cs) => Tree::App(*f, cs.iter().map(|c| c.collapse(i)).collect()),
        }
    }

    /// Some occurrence of `x_i` sits on a path of exposable steps.
    pub fn reaches(&self, i: u32, live: &HashSet<(u32, u32)>) -> bool {
        match self {
            Tree::Var(j) => *j == i,
            Tree::App(f, cs) => cs
                .iter()
                .enumerate()
                .any(|(k, c)| live.contains(&(*f, k as u32 + 1)) && c.reaches(i, live)),
        }
    }

    /// Depth of the shallowest `x_i`.
    pub fn depth_of(&self, i: u32) -> Option<u32> {
        match self {
            Tree::Var(j) => (*j == i).then_some(0),
            Tree::App(_, cs) => cs.iter().filter_map(|c| c.depth_of(i)).min().map(|d| d + 1),
        }
    }
}

/// Action words of length at most `k` enabled from ground `t`.
pub fn traces(g: &Grammar, t: &Tree, k: usize) -> BTreeSet<Vec<ActionId>> {
    let mut out = BTreeSet::from([Vec::new()]);
    let mut layer = vec![(t.clone(), Vec::new())];
    for _ in 0..k {
        let mut next = Vec::new();
        let mut states = HashSet::new();
        for (s, w) in &layer {
            for j in 0..g.rules().len() {
                let r = RuleId(j as u32);
                if let Some(s2) = step(g, s, r) {
                    let mut w2: Vec<ActionId> = w.clone();
                    w2.push(g.rules()[j].action);
                    out.insert(w2.clone());
                    if states.insert((s2.clone(), w2.clone())) {
                        next.push((s2, w2));
                    }
                }
            }
        }
        layer = next;
    }
    out
}

/// Naive bounded bisimilarity on trees: `t ~_k u`; above level 0 a variable
/// only matches itself.
pub fn k_bisim(g: &Grammar, t: &Tree, u: &Tree, k: u32) -> bool {
    if k == 0 {
        return true;
    }
    if let (Tree::Var(_), _) | (_, Tree::Var(_)) = (t, u) {
        return t == u;
    }
    let succ = |s: &Tree| -> Vec<(ActionId, Tree)> {
        (0..g.rules().len())
            .filter_map(|j| step(g, s, RuleId(j as u32)).map(|n| (g.rules()[j].action, n)))
            .collect()
    };
    let (ts, us) = (succ(t), succ(u));
    let covered = |xs: &[(ActionId, Tree)], ys: &[(ActionId, Tree)], flip: bool| {
        xs.iter().all(|(a, x)| {
            ys.iter().any(|(b, y)| a == b && if flip { k_bisim(g, y, x, k - 1) } else { k_bisim(g, x, y, k - 1) })
        })
    };
    covered(&ts, &us, false) && covered(&us, &ts, true)
}

use fogbisim::bases::{NsgParams, NsgSequence};
use fogbisim::equiv::{EqLevel, EqOracle};
use fogbisim::terms::Substitution;

/// Longest `(n,s,g)`-sequence that can be built from `candidates` under the
/// tail `sigma`: one pair per distinct finite level, highest first, each
/// taken when its smallest representative fits the size allowance of its
/// position. Taking a level never hurts later positions, whose allowance
/// only grows.
pub fn longest_chain(
    o: &mut EqOracle,
    candidates: &[(TermId, TermId)],
    sigma: &Substitution,
    s: u64,
    g: u64,
) -> NsgSequence {
    let mut by_level: std::collections::BTreeMap<u32, (usize, (TermId, TermId))> = Default::default();
    for &(e, f) in candidates {
        let es = o.store_mut().apply(e, sigma);
        let fs = o.store_mut().apply(f, sigma);
        if let EqLevel::Finite(k) = o.eq_level(es, fs) {
            let size = o.store().pressize(&[e, f]);
            let slot = by_level.entry(k).or_insert((size, (e, f)));
            if size < slot.0 {
                *slot = (size, (e, f));
            }
        }
    }
    let mut tops = Vec::new();
    for (_, (size, pair)) in by_level.into_iter().rev() {
        let allowance = s + g * tops.len() as u64;
        if size as u64 <= allowance {
            tops.push(pair);
        }
    }
    NsgSequence { tops, tail: sigma.clone() }
}

/// Direct check of the defining conditions, independent of the library's.
pub fn nsg_valid(o: &mut EqOracle, seq: &NsgSequence, p: &NsgParams) -> bool {
    if seq.tops.is_empty() {
        return false;
    }
    let mut last: Option<u32> = None;
    for (j, &(e, f)) in seq.tops.iter().enumerate() {
        if o.store().varin(&[e, f]).iter().any(|&x| x > p.n) {
            return false;
        }
        let cap = &p.s + &p.g * num_bigint::BigUint::from(j);
        if num_bigint::BigUint::from(o.store().pressize(&[e, f])) > cap {
            return false;
        }
        let es = o.store_mut().apply(e, &seq.tail);
        let fs = o.store_mut().apply(f, &seq.tail);
        let EqLevel::Finite(k) = o.eq_level(es, fs) else { return false };
        if last.is_some_and(|l| k >= l) {
            return false;
        }
        last = Some(k);
    }
    true
}

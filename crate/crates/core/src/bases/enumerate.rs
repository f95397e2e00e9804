use std::collections::{BTreeSet, HashSet};

use crate::terms::{NontermId, RawGraph, RawNode, RawRef, TermId, TermStore};

/// `j` if `varin(E,F) = {x1..xj}` exactly.
pub fn prefix_vars(store: &TermStore, e: TermId, f: TermId) -> Option<u32> {
    let vars = store.varin(&[e, f]);
    let j = vars.len() as u32;
    (vars.iter().copied().eq(1..=j)).then_some(j)
}

#[derive(Clone, Copy)]
enum Label {
    Var(u32),
    App(NontermId, usize),
}

/// Every regular term with at most `max_size` distinct subterms over
/// variables `x1..x_vars`, each once, ordered by id.
pub fn terms_up_to(store: &mut TermStore, max_size: usize, vars: u32) -> Vec<TermId> {
    let sig = store.signature().clone();
    let mut labels: Vec<Label> = (1..=vars).map(Label::Var).collect();
    labels.extend(sig.ids().map(|f| Label::App(f, sig.arity(f))));
    let mut seen = BTreeSet::new();
    for size in 1..=max_size {
        let mut choice = vec![(0usize, Vec::<usize>::new()); size];
        for c in choice.iter_mut() {
            c.1 = vec![0; arity(labels[0])];
        }
        loop {
            if is_bfs_canonical(&choice) {
                let raw = RawGraph {
                    nodes: choice
                        .iter()
                        .map(|(l, kids)| match labels[*l] {
                            Label::Var(i) => RawNode::var(i),
                            Label::App(f, _) => {
                                RawNode::app(f, kids.iter().map(|&k| RawRef::Node(k)).collect())
                            }
                        })
                        .collect(),
                    roots: vec![0],
                };
                let t = store.intern_graph(&raw).expect("enumerated graphs are well-formed")[0];
                seen.insert(t);
            }
            if !advance(&mut choice, &labels, size) {
                break;
            }
        }
    }
    seen.into_iter().collect()
}

fn arity(l: Label) -> usize {
    match l {
        Label::Var(_) => 0,
        Label::App(_, a) => a,
    }
}

/// Odometer over (label, children) assignments, last node fastest.
fn advance(choice: &mut [(usize, Vec<usize>)], labels: &[Label], size: usize) -> bool {
    for node in (0..choice.len()).rev() {
        let (l, kids) = &mut choice[node];
        for k in (0..kids.len()).rev() {
            if kids[k] + 1 < size {
                kids[k] += 1;
                return true;
            }
            kids[k] = 0;
        }
        if *l + 1 < labels.len() {
            *l += 1;
            *kids = vec![0; arity(labels[*l])];
            return true;
        }
        *l = 0;
        *kids = vec![0; arity(labels[0])];
    }
    false
}

/// Nodes are numbered in breadth-first discovery order from node 0 and all
/// are reachable; every graph has exactly one such numbering per shape.
fn is_bfs_canonical(choice: &[(usize, Vec<usize>)]) -> bool {
    let mut next = 1;
    let mut head = 0;
    while head < next {
        for &k in &choice[head].1 {
            if k == next {
                next += 1;
            } else if k > next {
                return false;
            }
        }
        head += 1;
    }
    next == choice.len()
}

/// Unordered pairs `E ≠ F` from `terms` with `varin(E,F) = {x1..xj}` and
/// `pressize(E,F) ≤ max_size`.
pub fn pairs_with_prefix_vars(
    store: &TermStore,
    terms: &[TermId],
    j: u32,
    max_size: usize,
) -> Vec<(TermId, TermId)> {
    let allowed: HashSet<u32> = (1..=j).collect();
    let fits: Vec<TermId> = terms
        .iter()
        .copied()
        .filter(|&t| store.varin(&[t]).iter().all(|x| allowed.contains(x)))
        .collect();
    let mut out = Vec::new();
    for (a, &e) in fits.iter().enumerate() {
        for &f in &fits[a + 1..] {
            if prefix_vars(store, e, f) == Some(j) && store.pressize(&[e, f]) <= max_size {
                out.push((e, f));
            }
        }
    }
    out
}

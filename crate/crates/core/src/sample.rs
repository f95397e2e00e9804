//! Seeded random grammars and terms for batteries and demos.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::grammar::{ActionId, Grammar, Rhs, Rule};
use crate::terms::{NontermId, Signature, TermId, TermStore};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GrammarShape {
    pub nonterminals: usize,
    pub max_arity: usize,
    pub rules: usize,
    pub actions: usize,
    /// At most one rule per (nonterminal, action).
    pub deterministic: bool,
    pub rhs_height: u32,
}

impl Default for GrammarShape {
    fn default() -> Self {
        GrammarShape {
            nonterminals: 4,
            max_arity: 3,
            rules: 8,
            actions: 2,
            deterministic: false,
            rhs_height: 2,
        }
    }
}

/// A random grammar; the first nonterminal is nullary so that ground terms exist.
pub fn random_grammar(rng: &mut impl Rng, shape: GrammarShape) -> Grammar {
    let n = rng.gen_range(1..=shape.nonterminals.max(1));
    let mut sig = Signature::new();
    for k in 0..n {
        let arity = if k == 0 { 0 } else { rng.gen_range(0..=shape.max_arity) };
        sig.add(&format!("N{k}"), arity);
    }
    let actions: Vec<String> = (0..shape.actions.max(1)).map(|k| format!("a{k}")).collect();
    let count = rng.gen_range(1..=shape.rules.max(1));
    let mut rules = Vec::with_capacity(count);
    let mut used = std::collections::HashSet::new();
    for _ in 0..count * 4 {
        if rules.len() == count {
            break;
        }
        let lhs = NontermId(rng.gen_range(0..n) as u32);
        let action = ActionId(rng.gen_range(0..actions.len()) as u32);
        if shape.deterministic && !used.insert((lhs, action)) {
            continue;
        }
        let arity = sig.arity(lhs) as u32;
        let rhs = random_rhs(rng, &sig, arity, shape.rhs_height);
        rules.push(Rule {
            name: format!("r{}", rules.len() + 1),
            lhs,
            action,
            rhs,
        });
    }
    Grammar::new(sig, actions, rules).expect("generated rules are well-formed")
}

fn random_rhs(rng: &mut impl Rng, sig: &Signature, vars: u32, height: u32) -> Rhs {
    let leaf = height == 0 || rng.gen_bool(0.3);
    if leaf && vars > 0 && rng.gen_bool(0.7) {
        return Rhs::Var(rng.gen_range(1..=vars));
    }
    let candidates: Vec<NontermId> = sig
        .ids()
        .filter(|&f| height > 0 || sig.arity(f) == 0)
        .collect();
    let f = *candidates.choose(rng).expect("a nullary nonterminal exists");
    let args = (0..sig.arity(f))
        .map(|_| random_rhs(rng, sig, vars, height.saturating_sub(1)))
        .collect();
    Rhs::App(f, args)
}

/// A random finite term of height at most `height` over variables `x1..x_vars`.
pub fn random_term(rng: &mut impl Rng, store: &mut TermStore, height: u32, vars: u32) -> TermId {
    let sig = store.signature().clone();
    let leaf = height == 0 || rng.gen_bool(0.25);
    if leaf && vars > 0 && rng.gen_bool(0.5) {
        return store.var(rng.gen_range(1..=vars));
    }
    let candidates: Vec<NontermId> = sig
        .ids()
        .filter(|&f| !leaf || sig.arity(f) == 0)
        .collect();
    let f = *candidates.choose(rng).expect("a nullary nonterminal exists");
    let kids: Vec<TermId> = (0..sig.arity(f))
        .map(|_| random_term(rng, store, height.saturating_sub(1), vars))
        .collect();
    store.app(f, &kids).expect("arity matches")
}

/// A random regular term: a random finite term in which one random variable
/// occurrence is tied back to the root.
pub fn random_cyclic_term(rng: &mut impl Rng, store: &mut TermStore, height: u32, vars: u32) -> TermId {
    let t = random_term(rng, store, height, vars + 1);
    store.omega_iterate(t, vars + 1)
}

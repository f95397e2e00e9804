mod common;

use std::sync::Arc;

use common::Tree;
use fogbisim::grammar::{compute_constants, parse_grammar, Grammar, RuleId};
use fogbisim::lts::{
    is_simple_stair, is_stair, replay, run_word, simple_stair_decompose, step_rule, transitions, Replay,
};
use fogbisim::sample::{random_grammar, random_term, rng, GrammarShape};
use fogbisim::terms::{TermId, TermStore};
use proptest::prelude::*;
use rand::Rng;

fn setup(seed: u64) -> (Arc<Grammar>, TermStore, rand_chacha::ChaCha8Rng) {
    let mut r = rng(seed);
    let g = Arc::new(random_grammar(&mut r, GrammarShape::default()));
    let store = g.new_store();
    (g, store, r)
}

/// A random performable path of length at most `len` from `t`.
fn random_path(g: &Grammar, store: &mut TermStore, r: &mut impl Rng, t: TermId, len: usize) -> Vec<RuleId> {
    let mut w = Vec::new();
    let mut cur = t;
    for _ in 0..len {
        let ts = transitions(g, store, cur);
        if ts.is_empty() {
            break;
        }
        let (rule, next) = ts[r.gen_range(0..ts.len())];
        w.push(rule);
        cur = next;
    }
    w
}

/// A constant has height 0 yet may rewrite to a rhs of height `hinc + 1`,
/// so the height bound starts from at least 1.
fn height_base(s: &TermStore, t: TermId) -> u64 {
    (s.height(t).unwrap() as u64).max(1)
}

#[test]
fn height_can_jump_by_more_than_hinc_from_a_constant() {
    let g = parse_grammar("nonterminals: Z/0, C/2\nactions: a\nrule r: Z -a-> C(C(Z,Z),Z)\n").unwrap();
    let mut s = g.new_store();
    let z = s.parse("Z").unwrap();
    let (_, f) = transitions(&g, &mut s, z)[0];
    let hinc = compute_constants(&g).hinc;
    assert_eq!((s.height(z).unwrap(), s.height(f).unwrap(), hinc), (0, 2, 1));
    assert!(s.height(f).unwrap() as u64 <= height_base(&s, z) + hinc);
}

#[test]
fn fig1_steps() {
    let g = parse_grammar(include_str!("../grammars/fig1.fog")).unwrap();
    let mut s = g.new_store();
    let e1 = s.parse("A(D(x5,C(x2,B)),x5,B)").unwrap();
    let e3 = s.omega_iterate(e1, 2);
    let r1 = g.rule_lookup("r1").unwrap();
    let r2 = g.rule_lookup("r2").unwrap();
    let x5 = s.var(5);
    assert_eq!(step_rule(&g, &mut s, e3, r1), Some(x5));
    let want = s.parse("C(x5,D(x5,D(x5,C(x2,B))))").unwrap();
    assert_eq!(step_rule(&g, &mut s, e1, r2), Some(want));
}

#[test]
fn g1_stair_example() {
    let g = parse_grammar(include_str!("../grammars/g1.fog")).unwrap();
    let mut s = g.new_store();
    let t = s.parse("A(Z)").unwrap();
    let w = g.parse_word("r2 r1").unwrap();
    let p = run_word(&g, &mut s, t, &w).unwrap();
    assert_eq!(p.end(), t);
    assert!(is_stair(&g, &mut s, &w));
    assert_eq!(simple_stair_decompose(&g, &mut s, &p).unwrap(), vec![w.clone()]);
    let empty = run_word(&g, &mut s, t, &[]).unwrap();
    assert!(simple_stair_decompose(&g, &mut s, &empty).unwrap().is_empty());
    let sink = g.parse_word("r1").unwrap();
    assert!(!is_stair(&g, &mut s, &sink));
    let lhs = s.abstract_lhs(g.rule(sink[0]).lhs);
    assert_eq!(replay(&g, &mut s, lhs, &sink), Replay::Var { steps: 1, var: 1 });
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn transitions_match_tree_rewriting(seed in any::<u64>()) {
        let (g, mut s, mut r) = setup(seed);
        for _ in 0..5 {
            let t = random_term(&mut r, &mut s, 3, 2);
            let tree = Tree::from_store(&s, t);
            for (rule, next) in transitions(&g, &mut s, t) {
                prop_assert_eq!(Some(Tree::from_store(&s, next)), common::step(&g, &tree, rule));
                prop_assert_eq!(step_rule(&g, &mut s, t, rule), Some(next));
                prop_assert_eq!(run_word(&g, &mut s, t, &[rule]).map(|p| p.end()), Some(next));
            }
            let enabled = (0..g.rules().len()).filter(|&k| common::step(&g, &tree, RuleId(k as u32)).is_some()).count();
            prop_assert_eq!(enabled, transitions(&g, &mut s, t).len());
        }
    }

    #[test]
    fn paths_grow_boundedly(seed in any::<u64>()) {
        let (g, mut s, mut r) = setup(seed);
        let c = compute_constants(&g);
        let t = random_term(&mut r, &mut s, 3, 2);
        let mut ends = vec![t];
        let (paths, depth) = (3usize, 6usize);
        for _ in 0..paths {
            let w = random_path(&g, &mut s, &mut r, t, depth);
            let p = run_word(&g, &mut s, t, &w).unwrap();
            let f = p.end();
            prop_assert!(s.pressize(&[f]) <= s.pressize(&[t]) + w.len() * c.stepinc as usize);
            prop_assert!(height_base(&s, t) + w.len() as u64 * c.hinc >= s.height(f).unwrap() as u64);
            prop_assert!(s.varin(&[f]).is_subset(&s.varin(&[t])));
            ends.push(f);
        }
        prop_assert!(s.pressize(&ends) <= s.pressize(&[t]) + paths * depth * c.stepinc as usize);
    }

    #[test]
    fn stair_decomposition(seed in any::<u64>()) {
        let (g, mut s, mut r) = setup(seed);
        let c = compute_constants(&g);
        let t = random_term(&mut r, &mut s, 3, 0);
        let w = random_path(&g, &mut s, &mut r, t, 8);
        let stair_len = (0..=w.len()).rev().find(|&k| is_stair(&g, &mut s, &w[..k])).unwrap();
        let p = run_word(&g, &mut s, t, &w[..stair_len]).unwrap();
        let pieces = simple_stair_decompose(&g, &mut s, &p).unwrap();
        prop_assert_eq!(pieces.concat(), p.word.clone());
        for v in &pieces {
            prop_assert!(is_simple_stair(&g, &mut s, v));
        }
        let q = pieces.len();
        prop_assert!(s.pressize(&[p.end()]) <= s.pressize(&[t]) + q * c.stepinc as usize);
        prop_assert!(height_base(&s, t) + q as u64 * c.hinc >= s.height(p.end()).unwrap() as u64);
    }
}

mod common;

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use common::{longest_chain, nsg_valid, Tree};
use fogbisim::bases::{
    bound_of_candidate, build_full_base_capped, nsg_problems, present_stair_as_nsg, reduce_nsg_step,
    sound_candidate_search, terms_up_to, BasesError, Candidate, Caps, NsgParams, NsgSequence, SearchStatus,
};
use fogbisim::equiv::{EqLevel, EqOracle};
use fogbisim::grammar::{parse_grammar, Grammar};
use fogbisim::plays::{refine_segments, transform_to_balanced, PlayContext};
use fogbisim::sample::{random_term, rng};
use fogbisim::terms::{Substitution, TermId};
use proptest::prelude::*;

const TINY: &[(&str, &str)] = &[
    ("tiny", include_str!("../grammars/tiny.fog")),
    ("tiny3", include_str!("../grammars/tiny3.fog")),
    ("counter", include_str!("../grammars/counter.fog")),
    ("g1", include_str!("../grammars/g1.fog")),
];

fn grammar(text: &str) -> Arc<Grammar> {
    Arc::new(parse_grammar(text).unwrap())
}

fn ground_tail(o: &mut EqOracle, seed: u64, n: u32) -> Substitution {
    let mut r = rng(seed);
    let pairs: Vec<(u32, TermId)> = (1..=n).map(|i| (i, random_term(&mut r, o.store_mut(), 4, 0))).collect();
    Substitution::from_pairs(o.store(), pairs)
}

fn all_pairs(ts: &[TermId]) -> Vec<(TermId, TermId)> {
    let mut out = Vec::new();
    for (a, &e) in ts.iter().enumerate() {
        for &f in &ts[a + 1..] {
            out.push((e, f));
        }
    }
    out
}

/// Finite trees of height below `h` over the grammar's symbols and `x1..xn`.
fn finite_trees(g: &Grammar, h: u32, n: u32) -> Vec<Tree> {
    let sig = g.signature();
    let mut level: Vec<Tree> = (1..=n).map(Tree::Var).collect();
    level.extend(sig.ids().filter(|&f| sig.arity(f) == 0).map(|f| Tree::App(f.0, vec![])));
    for _ in 1..h {
        let mut next: BTreeSet<Tree> = level.iter().cloned().collect();
        for f in sig.ids().filter(|&f| sig.arity(f) > 0) {
            let mut kids: Vec<Vec<Tree>> = vec![vec![]];
            for _ in 0..sig.arity(f) {
                kids = kids
                    .into_iter()
                    .flat_map(|k| {
                        level.iter().map(move |c| {
                            let mut k = k.clone();
                            k.push(c.clone());
                            k
                        })
                    })
                    .collect();
            }
            next.extend(kids.into_iter().map(|k| Tree::App(f.0, k)));
        }
        level = next.into_iter().collect();
    }
    level
}

fn distinct_subtrees(t: &Tree, out: &mut HashSet<Tree>) {
    out.insert(t.clone());
    if let Tree::App(_, cs) = t {
        cs.iter().for_each(|c| distinct_subtrees(c, out));
    }
}

#[test]
fn enumeration_is_sound_and_covers_finite_terms() {
    for (name, text) in TINY {
        let g = grammar(text);
        let mut o = EqOracle::new(g.clone(), 8);
        for (m, n) in [(1, 0), (2, 1), (3, 1), (3, 2)] {
            let ts = terms_up_to(o.store_mut(), m, n);
            let set: HashSet<TermId> = ts.iter().copied().collect();
            assert_eq!(set.len(), ts.len(), "{name}: duplicates");
            for &t in &ts {
                assert!(o.store().pressize(&[t]) <= m);
                assert!(o.store().varin(&[t]).iter().all(|&x| (1..=n).contains(&x)));
            }
            for tree in finite_trees(&g, m as u32, n) {
                let mut subs = HashSet::new();
                distinct_subtrees(&tree, &mut subs);
                if subs.len() > m {
                    continue;
                }
                let id = o.parse(&tree.text(&g)).unwrap();
                assert!(set.contains(&id), "{name}: {} missing at size {m}", tree.text(&g));
            }
        }
    }
}

#[test]
fn layers_follow_the_size_recursion() {
    for (name, text) in TINY {
        let g = grammar(text);
        let ctx = PlayContext::new(&g);
        let stepinc = ctx.consts.stepinc;
        for (n, s, gg) in [(1, 3, 1), (2, 2, 1), (1, 2, 0)] {
            let mut o = EqOracle::new(g.clone(), 10);
            let p = NsgParams::new(n, s, gg);
            let full = build_full_base_capped(&mut o, &p, stepinc, Caps::default());
            let pairs: Vec<_> = full.candidate.pairs().map(|(_, i)| i).collect();
            let mut size = s as u128;
            let mut total = 0u128;
            for (layer, j) in full.bound.layers.iter().zip((0..=n).rev()) {
                assert_eq!(layer.vars, j);
                assert_eq!(layer.size, size.into(), "{name} ({n},{s},{gg}) j={j}");
                let e = pairs
                    .iter()
                    .filter(|i| i.vars <= j && i.size as u128 <= size)
                    .map(|i| i.level)
                    .max()
                    .unwrap_or(0);
                assert_eq!(layer.e, e);
                total += 1 + e as u128;
                size = 2 * size + gg as u128 * (1 + e as u128) + e as u128 * stepinc as u128;
            }
            assert_eq!(full.bound.value, total.into());
        }
    }
}

#[test]
fn full_base_equals_the_sound_search() {
    for (name, text) in TINY {
        let g = grammar(text);
        let ctx = PlayContext::new(&g);
        for (n, s, gg) in [(0, 2, 0), (1, 2, 0)] {
            let mut o = EqOracle::new(g.clone(), 10);
            let p = NsgParams::new(n, s, gg);
            let full = build_full_base_capped(&mut o, &p, ctx.consts.stepinc, Caps::default());
            assert!(full.complete, "{name} ({n},{s},{gg})");
            let found = sound_candidate_search(&mut o, &p, ctx.consts.stepinc, &ctx.consts.c, Caps::default());
            assert_eq!(found.status, SearchStatus::Sound, "{name}");
            let a: Vec<_> = full.candidate.pairs().collect();
            let b: Vec<_> = found.candidate.pairs().collect();
            assert_eq!(a, b, "{name} ({n},{s},{gg})");
            assert_eq!(full.bound, found.bound);
        }
    }
}

#[test]
fn sequences_under_a_full_base_are_no_longer_than_its_bound() {
    for (name, text) in TINY {
        let g = grammar(text);
        let ctx = PlayContext::new(&g);
        for (n, s, gg) in [(0, 2, 0), (1, 2, 0)] {
            let mut o = EqOracle::new(g.clone(), 10);
            let p = NsgParams::new(n, s, gg);
            let full = build_full_base_capped(&mut o, &p, ctx.consts.stepinc, Caps::default());
            assert!(full.complete);
            let bound = u64::try_from(&full.bound.value).unwrap();
            let ts = terms_up_to(o.store_mut(), s as usize, n);
            let cands = all_pairs(&ts);
            for seed in 0..40 {
                let sigma = ground_tail(&mut o, seed, n);
                let chain = longest_chain(&mut o, &cands, &sigma, s, gg);
                if chain.is_empty() {
                    continue;
                }
                assert!(nsg_valid(&mut o, &chain, &p));
                assert!(nsg_problems(&mut o, &chain, &p).unwrap().is_empty());
                assert!(chain.len() as u64 <= bound, "{name}: z={} > E_B={bound}", chain.len());
            }
        }
    }
}

#[test]
fn problems_name_each_broken_condition() {
    let g = grammar(TINY[2].1);
    let mut o = EqOracle::new(g, 10);
    let p = NsgParams::new(1, 2, 0);
    let ax = o.parse("A(x1)").unwrap();
    let ab = o.parse("A(B)").unwrap();
    let x2 = o.parse("x2").unwrap();
    let aaz = o.parse("A(A(Z))").unwrap();
    let z = o.parse("Z").unwrap();
    let b = o.parse("B").unwrap();
    let sigma = Substitution::from_pairs(o.store(), [(1, z)]);
    let seq = NsgSequence { tops: vec![], tail: sigma.clone() };
    assert_eq!(nsg_problems(&mut o, &seq, &p).unwrap(), vec!["empty sequence"]);
    let seq = NsgSequence { tops: vec![(x2, z), (aaz, b)], tail: sigma.clone() };
    let probs = nsg_problems(&mut o, &seq, &p).unwrap();
    assert!(probs.iter().any(|s| s.contains("x2 beyond x1")), "{probs:?}");
    assert!(probs.iter().any(|s| s.contains("size 4 > 2")), "{probs:?}");
    // A(Z) vs A(B) sits at level 1, Z vs B at level 0.
    let p = NsgParams::new(1, 4, 0);
    let seq = NsgSequence { tops: vec![(ax, ab), (z, b)], tail: sigma.clone() };
    assert!(nsg_problems(&mut o, &seq, &p).unwrap().is_empty());
    let seq = NsgSequence { tops: vec![(z, b), (ax, ab)], tail: sigma };
    let probs = nsg_problems(&mut o, &seq, &p).unwrap();
    assert!(probs.iter().any(|s| s.contains("do not decrease")), "{probs:?}");
}

#[test]
fn stair_sequences_use_at_most_n_variables() {
    let g = grammar(include_str!("../grammars/ladder.fog"));
    let ctx = PlayContext::new(&g);
    let mut o = EqOracle::new(g.clone(), 32);
    let t = o.parse("A(K(K(K(K(K(K(K(K(E)))))))))").unwrap();
    let u = o.parse("K(K(K(K(K(K(E))))))").unwrap();
    let (b, path) = transform_to_balanced(&mut o, &ctx, t, u).unwrap();
    let seg = refine_segments(o.store(), &b, &path);
    assert!(!seg.crucial.is_empty());
    for idx in 0..seg.crucial.len() {
        let st = present_stair_as_nsg(&mut o, &ctx, &b, &path, &seg, idx).unwrap();
        assert!(nsg_valid(&mut o, &st.seq, &st.params));
        for &(e, f) in &st.seq.tops {
            assert!(o.store().varin(&[e, f]).iter().all(|&x| x <= st.params.n));
        }
    }
}

fn check_reduction(o: &mut EqOracle, seq: &NsgSequence, p: &NsgParams, stepinc: u64) -> Result<bool, TestCaseError> {
    let before = seq.levels(o).unwrap();
    match reduce_nsg_step(o, seq, p, stepinc) {
        Ok(red) => {
            prop_assert_eq!(red.params.n, p.n - 1);
            prop_assert_eq!(&red.levels[..], &before[red.dropped..]);
            prop_assert_eq!(red.seq.levels(o).unwrap(), red.levels.clone());
            prop_assert!(!o.store().varin(&[red.h_omega]).contains(&red.witness.var));
            if !red.seq.is_empty() {
                prop_assert!(nsg_valid(o, &red.seq, &red.params));
            }
            Ok(true)
        }
        Err(BasesError::NothingToReduce(k)) => {
            prop_assert_eq!(k, before[0]);
            Ok(false)
        }
        Err(e) => Err(TestCaseError::fail(e.to_string())),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn adding_pairs_never_lowers_the_bound(
        picks in prop::collection::vec((0usize..200, 0usize..200, 0u32..8), 1..12),
        which in 0usize..4,
    ) {
        let g = grammar(TINY[which].1);
        let mut o = EqOracle::new(g, 10);
        let ts = terms_up_to(o.store_mut(), 3, 2);
        let mut cand = Candidate::empty(NsgParams::new(2, 2, 1), 2);
        let mut last = bound_of_candidate(&cand).value;
        prop_assert!(last >= 1u32.into());
        for (a, b, k) in picks {
            let (e, f) = (ts[a % ts.len()], ts[b % ts.len()]);
            // A pair has one level; only genuinely new pairs count.
            if e == f || cand.contains(e, f) || cand.insert(o.store(), e, f, k).is_err() {
                continue;
            }
            let now = bound_of_candidate(&cand).value;
            prop_assert!(now >= last);
            last = now;
        }
    }

    #[test]
    fn reduction_keeps_levels_and_yields_a_sequence(which in 0usize..4, seed in 0u64..1000) {
        let g = grammar(TINY[which].1);
        let ctx = PlayContext::new(&g);
        let mut o = EqOracle::new(g, 12);
        let p = NsgParams::new(1, 3, 1);
        let ts = terms_up_to(o.store_mut(), 4, 1);
        let sigma = ground_tail(&mut o, seed, 1);
        let chain = longest_chain(&mut o, &all_pairs(&ts), &sigma, 3, 1);
        prop_assume!(!chain.is_empty());
        prop_assert!(nsg_valid(&mut o, &chain, &p));
        check_reduction(&mut o, &chain, &p, ctx.consts.stepinc)?;
    }

    #[test]
    fn library_and_direct_checks_agree(which in 0usize..4, seed in 0u64..1000, idx in prop::collection::vec(0usize..400, 1..5)) {
        let g = grammar(TINY[which].1);
        let mut o = EqOracle::new(g, 12);
        let p = NsgParams::new(1, 2, 1);
        let ts = terms_up_to(o.store_mut(), 3, 2);
        let pairs = all_pairs(&ts);
        let tops: Vec<_> = idx.iter().map(|&i| pairs[i % pairs.len()]).collect();
        let seq = NsgSequence { tops, tail: ground_tail(&mut o, seed, 2) };
        let elems = seq.elements(o.store_mut());
        prop_assume!(elems.iter().all(|&(a, b)| matches!(o.eq_level(a, b), EqLevel::Finite(_))));
        let lib = nsg_problems(&mut o, &seq, &p).unwrap().is_empty();
        prop_assert_eq!(lib, nsg_valid(&mut o, &seq, &p));
    }
}

//! Eq-levels of sampled pairs, computed in parallel, with the distribution
//! of levels and a bisimilarity certificate for pairs at the cutoff.
//!
//! cargo run --release --example eq_levels -- [pairs] [jobs]

use std::collections::BTreeMap;
use std::sync::Arc;

use fogbisim::equiv::{EqLevel, EqOracle};
use fogbisim::grammar::parse_grammar;
use fogbisim::sample::{random_term, rng};

fn main() {
    let mut args = std::env::args().skip(1);
    let count: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    let jobs: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(4);
    let g = Arc::new(parse_grammar(include_str!("../grammars/switch.fog")).expect("bundled grammar parses"));
    let mut o = EqOracle::new(g, 24);
    let mut r = rng(11);
    let pairs: Vec<_> = (0..count)
        .map(|_| {
            let t = random_term(&mut r, o.store_mut(), 4, 0);
            let u = random_term(&mut r, o.store_mut(), 4, 0);
            (t, u)
        })
        .collect();
    let levels = o.eq_levels(&pairs, jobs);

    let mut hist = BTreeMap::new();
    let mut open = Vec::new();
    for (&p, l) in pairs.iter().zip(&levels) {
        match l {
            EqLevel::Finite(k) => *hist.entry(*k).or_insert(0) += 1,
            EqLevel::AtLeast(_) => open.push(p),
        }
    }
    for (k, n) in &hist {
        println!("level {k:3}: {n}");
    }
    let certified = open
        .iter()
        .filter(|&&(t, u)| o.certify_bisimilar(t, u, 20_000) == Some(true))
        .count();
    println!("at the cutoff: {} ({certified} certified bisimilar)", open.len());
}

//! Balances optimal plays from random pairs over the bundled grammars and
//! verifies every bound on the result.
//!
//! cargo run --release --example balanced_battery -- [pairs-per-grammar] [seed]

use std::sync::Arc;

use fogbisim::equiv::{EqLevel, EqOracle};
use fogbisim::grammar::parse_grammar;
use fogbisim::plays::{refine_segments, transform_to_balanced, verify_balanced, PlayContext};
use fogbisim::sample::{random_cyclic_term, random_term, rng};
use rand::Rng;

const GRAMMARS: &[(&str, &str)] = &[
    ("balance", include_str!("../grammars/balance.fog")),
    ("ladder", include_str!("../grammars/ladder.fog")),
    ("switch", include_str!("../grammars/switch.fog")),
    ("nest", include_str!("../grammars/nest.fog")),
    ("g1", include_str!("../grammars/g1.fog")),
    ("counter", include_str!("../grammars/counter.fog")),
    ("stack", include_str!("../grammars/stack.fog")),
    ("fig1", include_str!("../grammars/fig1.fog")),
];

fn main() {
    let mut args = std::env::args().skip(1);
    let per: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(60);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut r = rng(seed);
    for (name, text) in GRAMMARS {
        let g = Arc::new(parse_grammar(text).expect("bundled grammar parses"));
        let ctx = PlayContext::new(&g);
        let mut o = EqOracle::new(g.clone(), 32);
        let (mut done, mut balanced, mut phases, mut bad) = (0, 0, 0, 0);
        let mut tries = 0;
        while done < per && tries < per * 50 {
            tries += 1;
            let (t, u) = {
                let s = o.store_mut();
                let t = if r.gen_bool(0.2) { random_cyclic_term(&mut r, s, 4, 0) } else { random_term(&mut r, s, 5, 0) };
                let u = if r.gen_bool(0.2) { random_cyclic_term(&mut r, s, 4, 0) } else { random_term(&mut r, s, 5, 0) };
                (t, u)
            };
            let EqLevel::Finite(k) = o.eq_level(t, u) else { continue };
            if !(1..=30).contains(&k) {
                continue;
            }
            done += 1;
            let (b, path) = match transform_to_balanced(&mut o, &ctx, t, u) {
                Ok(x) => x,
                Err(e) => {
                    bad += 1;
                    println!("  {} / {}: {e}", o.show(t), o.show(u));
                    continue;
                }
            };
            let seg = refine_segments(o.store(), &b, &path);
            let rep = verify_balanced(&mut o, &ctx, &b, &path, &seg);
            if !b.phases.is_empty() {
                balanced += 1;
                phases += b.phases.len();
            }
            if !rep.passed() {
                bad += 1;
                for c in rep.failures() {
                    println!("  {} / {}: {} {}", o.show(t), o.show(u), c.name, c.detail);
                }
            }
        }
        println!("{name}: pairs={done} balanced={balanced} phases={phases} failing={bad}");
    }
}

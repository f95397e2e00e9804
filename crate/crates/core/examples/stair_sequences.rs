//! Crucial segments of balanced plays presented as `(n,s,g)`-sequences with
//! the grammar's own parameters, then reduced one variable at a time.
//!
//! cargo run --release --example stair_sequences -- [pairs]

use std::sync::Arc;

use fogbisim::bases::{nsg_problems, present_stair_as_nsg, reduce_nsg_step, BasesError};
use fogbisim::equiv::{EqLevel, EqOracle};
use fogbisim::grammar::parse_grammar;
use fogbisim::plays::{refine_segments, transform_to_balanced, PlayContext};
use fogbisim::sample::{random_term, rng};

const GRAMMARS: &[(&str, &str)] = &[
    ("ladder", include_str!("../grammars/ladder.fog")),
    ("switch", include_str!("../grammars/switch.fog")),
    ("nest", include_str!("../grammars/nest.fog")),
];

fn main() {
    let tries: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    for (name, text) in GRAMMARS {
        let g = Arc::new(parse_grammar(text).expect("bundled grammar parses"));
        let ctx = PlayContext::new(&g);
        let mut o = EqOracle::new(g.clone(), 32);
        let mut r = rng(9);
        let (mut segments, mut sound, mut reductions) = (0, 0, 0);
        for _ in 0..tries {
            let t = random_term(&mut r, o.store_mut(), 6, 0);
            let u = random_term(&mut r, o.store_mut(), 6, 0);
            let EqLevel::Finite(k) = o.eq_level(t, u) else { continue };
            if k == 0 || k > 30 {
                continue;
            }
            let (b, path) = transform_to_balanced(&mut o, &ctx, t, u).expect("balancing succeeds below the cutoff");
            let seg = refine_segments(o.store(), &b, &path);
            for idx in 0..seg.crucial.len() {
                segments += 1;
                let st = present_stair_as_nsg(&mut o, &ctx, &b, &path, &seg, idx).expect("stairs present");
                if !nsg_problems(&mut o, &st.seq, &st.params).unwrap().is_empty() {
                    continue;
                }
                sound += 1;
                let (mut seq, mut p) = (st.seq, st.params);
                while p.n > 0 && !seq.is_empty() {
                    match reduce_nsg_step(&mut o, &seq, &p, ctx.consts.stepinc) {
                        Ok(red) => {
                            reductions += 1;
                            seq = red.seq;
                            p = red.params;
                        }
                        Err(BasesError::NothingToReduce(_)) => break,
                        Err(e) => panic!("{name}: {e}"),
                    }
                }
            }
        }
        println!(
            "{name}: crucial segments {segments}, valid sequences {sound}, reduction steps {reductions}  (n={} s={} g={})",
            ctx.consts.n, ctx.consts.s, ctx.consts.g
        );
    }
}

//! Full candidate bases over tiny grammars, capped by size, next to the
//! candidate grown by the threshold search; both give the same pairs when
//! nothing is capped.
//!
//! cargo run --release --example candidate_bases

use std::sync::Arc;

use fogbisim::bases::{build_full_base_capped, sound_candidate_search, Caps, NsgParams};
use fogbisim::equiv::EqOracle;
use fogbisim::grammar::parse_grammar;
use fogbisim::plays::PlayContext;

const GRAMMARS: &[(&str, &str)] = &[
    ("tiny", include_str!("../grammars/tiny.fog")),
    ("tiny3", include_str!("../grammars/tiny3.fog")),
    ("counter", include_str!("../grammars/counter.fog")),
    ("g1", include_str!("../grammars/g1.fog")),
];

fn main() {
    let caps = Caps::default();
    for (name, text) in GRAMMARS {
        let g = Arc::new(parse_grammar(text).expect("bundled grammar parses"));
        let ctx = PlayContext::new(&g);
        for (n, s, gg) in [(0, 2, 0), (1, 2, 0), (1, 3, 1)] {
            let mut o = EqOracle::new(g.clone(), 10);
            let p = NsgParams::new(n, s, gg);
            let full = build_full_base_capped(&mut o, &p, ctx.consts.stepinc, caps);
            let found = sound_candidate_search(&mut o, &p, ctx.consts.stepinc, &ctx.consts.c, caps);
            let same = full.candidate.pairs().map(|x| x.0).eq(found.candidate.pairs().map(|x| x.0));
            let layers: Vec<String> = full
                .bound
                .layers
                .iter()
                .map(|l| format!("j={} s={} e={} #{}", l.vars, l.size, l.e, l.members))
                .collect();
            println!(
                "{name:8} (n,s,g)=({n},{s},{gg})  E_B={}  complete={}  [{}]  search={:?} after {} round(s), same={same}",
                full.bound.value,
                full.complete,
                layers.join(", "),
                found.status,
                found.iterations
            );
        }
    }
}

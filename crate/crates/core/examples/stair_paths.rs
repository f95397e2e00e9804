//! Paths in the term LTS: sink segments, stairs and their factorization
//! into simple stairs.
//!
//! cargo run --example stair_paths

use std::sync::Arc;

use fogbisim::grammar::parse_grammar;
use fogbisim::lts::{is_d0_sinking, is_sink_segment, is_stair, run_word, simple_stair_decompose, sink_prefix};

fn main() {
    let g = Arc::new(parse_grammar(include_str!("../grammars/g1.fog")).expect("bundled grammar parses"));
    let mut store = g.new_store();
    let t = store.parse("A(A(Z))").unwrap();
    for word in ["r1", "r1 r1", "r2", "r2 r1", "r2 r2 r1 r1", "r2 r1 r1 r1"] {
        let w = g.parse_word(word).unwrap();
        let Some(p) = run_word(&g, &mut store, t, &w) else {
            println!("{word:14} not performable from {}", store.display(t));
            continue;
        };
        let stair = is_stair(&g, &mut store, &w);
        let pieces = if stair {
            simple_stair_decompose(&g, &mut store, &p)
                .unwrap()
                .iter()
                .map(|v| g.format_word(v))
                .collect::<Vec<_>>()
                .join(" | ")
        } else {
            String::from("-")
        };
        println!(
            "{word:14} ends {:14} sink-segment {:5} sink-prefix {:?} 2-sinking {:5} stair {:5} simple stairs [{pieces}]",
            store.display(p.end()),
            is_sink_segment(&g, &mut store, &p),
            sink_prefix(&g, &mut store, t, &w),
            is_d0_sinking(&g, &mut store, &p, 2),
            stair,
        );
    }
}

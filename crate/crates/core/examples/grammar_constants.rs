//! Parses a grammar, prints its shortest sink words and the constants
//! derived from it.
//!
//! cargo run --example grammar_constants -- [path.fog]

use fogbisim::grammar::{compute_constants, compute_sink_table, parse_grammar};

fn main() {
    let text = match std::env::args().nth(1) {
        Some(p) => std::fs::read_to_string(&p).unwrap_or_else(|e| panic!("{p}: {e}")),
        None => include_str!("../grammars/g1.fog").to_string(),
    };
    let g = match parse_grammar(&text) {
        Ok(g) => g,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    print!("{}", g.to_text());
    println!("deterministic: {}", g.is_deterministic());

    let sinks = compute_sink_table(&g);
    for (f, i, w) in sinks.entries() {
        println!("sink {}.x{i}: {} (length {})", g.signature().name(f), g.format_word(w), w.len());
    }
    for (name, value) in compute_constants(&g).rows() {
        println!("{name:8} {value}");
    }
}

//! An optimal play from a distinguished pair: the attacker lowers the level
//! by one each round and the defender keeps it.
//!
//! cargo run --example optimal_play

use std::sync::Arc;

use fogbisim::equiv::EqOracle;
use fogbisim::grammar::parse_grammar;
use fogbisim::plays::build_optimal_play;

fn main() {
    let g = Arc::new(parse_grammar(include_str!("../grammars/ladder.fog")).expect("bundled grammar parses"));
    let mut o = EqOracle::new(g.clone(), 32);
    let t = o.parse("A(K(K(K(K(K(E))))))").unwrap();
    let u = o.parse("K(K(K(K(E))))").unwrap();
    let play = build_optimal_play(&mut o, t, u).expect("the pair is distinguished");
    for i in 0..=play.len() {
        let (l, r) = play.pairs[i];
        let moves = if i == 0 {
            String::from("start")
        } else {
            format!("{}/{}", g.rule(play.left[i - 1]).name, g.rule(play.right[i - 1]).name)
        };
        println!("{moves:>8}  level {:2}  {}  vs  {}", play.levels[i], o.show(l), o.show(r));
    }
}

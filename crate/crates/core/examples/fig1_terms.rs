//! Regular terms as hash-consed graphs: sizes, substitution, the iterated
//! substitution and the two rules of the introductory picture.
//!
//! cargo run --example fig1_terms

use std::sync::Arc;

use fogbisim::grammar::parse_grammar;
use fogbisim::lts::transitions;
use fogbisim::terms::Substitution;

fn main() {
    let g = Arc::new(parse_grammar(include_str!("../grammars/fig1.fog")).expect("bundled grammar parses"));
    let mut store = g.new_store();
    let e1 = store.parse("A(D(x5,C(x2,B)),x5,B)").unwrap();
    let sigma = Substitution::from_pairs(&store, [(2, e1)]);
    let e2 = store.apply(e1, &sigma);
    let e3 = store.omega_iterate(e1, 2);

    println!("E1 = {}", store.display(e1));
    println!("E2 = E1[x2/E1] = {}", store.display(e2));
    println!("E3 = {}", store.display(e3));
    println!(
        "pressize E1 {}  E3 {}  (E1,E2) {}",
        store.pressize(&[e1]),
        store.pressize(&[e3]),
        store.pressize(&[e1, e2])
    );
    println!("height E1 {}  E3 finite: {}", store.height(e1).unwrap(), store.is_finite(e3));
    println!("varin(E1,E2) = {:?}", store.varin(&[e1, e2]));

    for t in [e1, e3] {
        for (r, s) in transitions(&g, &mut store, t) {
            println!("{} -{}-> {}", g.rule(r).name, g.action_name(g.label(r)), store.display(s));
        }
    }
    println!("\n{}", store.to_graph_text(&[("E1", e1), ("E3", e3)]));
}

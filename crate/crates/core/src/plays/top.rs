use crate::equiv::{EqOracle, Side};
use crate::lts::run_word;
use crate::terms::{Substitution, TermId, TermNode, TermStore};

use super::{BalanceStep, Play};

/// A `p`-top form `W = Gσ`: `G` is the unfolding of `W` cut at depth `p`,
/// with every leaf that is a cut point or a variable replaced by a fresh
/// variable, numbered left to right in depth-first order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TopForm {
    pub top: TermId,
    pub tail: Substitution,
    pub vars: u32,
}

pub fn top_form(store: &mut TermStore, t: TermId, p: u32) -> TopForm {
    let mut leaves = Vec::new();
    let top = cut(store, t, p, &mut leaves);
    let tail = Substitution::from_pairs(
        store,
        leaves.iter().enumerate().map(|(k, &s)| (k as u32 + 1, s)),
    );
    TopForm {
        top,
        tail,
        vars: leaves.len() as u32,
    }
}

fn cut(store: &mut TermStore, t: TermId, depth_left: u32, leaves: &mut Vec<TermId>) -> TermId {
    match store.node(t).clone() {
        TermNode::App(f, children) if depth_left > 0 => {
            let kids: Vec<TermId> = children
                .iter()
                .map(|&c| cut(store, c, depth_left - 1, leaves))
                .collect();
            store.app(f, &kids).expect("arity is preserved")
        }
        _ => {
            leaves.push(t);
            store.var(leaves.len() as u32)
        }
    }
}

/// Tops `(E,F)` of the bal-result of `step` relative to a safe form `Gσ` of
/// its pivot: `F` follows the pivot's word in `ρ` from `G`, and `E` is `E'`
/// with each `x_i` replaced by the term reached from `G` by the reach word.
/// `None` if some word is not performable from `G`.
pub fn bal_result_tops(
    o: &mut EqOracle,
    g_top: TermId,
    step: &BalanceStep,
    rho: &Play,
) -> Option<(TermId, TermId)> {
    let g = o.shared_grammar();
    let pivot_side = step.side.other();
    let f = run_word(&g, o.store_mut(), g_top, rho.word(pivot_side))?.end();
    let mut bar = Substitution::new();
    for reach in &step.reaches {
        let fi = run_word(&g, o.store_mut(), g_top, &reach.word)?.end();
        bar.insert(o.store(), reach.var, fi);
    }
    let e = o.store_mut().apply(step.split.top, &bar);
    Some(match step.side {
        Side::Left => (e, f),
        Side::Right => (f, e),
    })
}

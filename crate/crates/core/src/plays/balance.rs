use crate::equiv::{EqLevel, EqOracle, Side};
use crate::grammar::RuleWord;
use crate::lts::{replay, Replay};
use crate::terms::{NontermId, Substitution, TermId};

use super::{Play, PlayContext, PlayError};

/// `T = A(x1..xm)σ'` with `A(x1..xm) -u-> E'`, so that `T' = E'σ'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootSplit {
    pub nonterminal: NontermId,
    /// `E'`, a finite term over `x1..xm` (possibly a single variable).
    pub top: TermId,
    /// The root successors `x_iσ'` of `T`.
    pub args: Vec<TermId>,
}

/// The replacement `V_i` for `x_iσ'`, reached from the pivot by `word`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reach {
    pub var: u32,
    pub word: RuleWord,
    pub target: TermId,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalanceStep {
    /// The side whose term gets replaced; the pivot is on the other side.
    pub side: Side,
    pub split: RootSplit,
    pub pivot: TermId,
    pub reaches: Vec<Reach>,
    /// The bal-result `(E'σ'', U')` or `(T', F'σ'')`.
    pub result: (TermId, TermId),
    /// Eq-level of the finish of the balanced play, kept by the bal-result.
    pub level: u32,
}

impl BalanceStep {
    pub fn reach(&self, var: u32) -> &Reach {
        &self.reaches[var as usize - 1]
    }
}

/// `Some` iff `|ρ| = d0` and the `side` path of `ρ` is root-performable.
pub fn enables_balancing(o: &mut EqOracle, rho: &Play, side: Side, d0: usize) -> Option<RootSplit> {
    if rho.len() != d0 {
        return None;
    }
    let t = rho.term(side, 0);
    let f = o.store().root(t)?;
    let args = o.store().children(t).to_vec();
    let g = o.shared_grammar();
    let store = o.store_mut();
    let lhs = store.abstract_lhs(f);
    let top = match replay(&g, store, lhs, rho.word(side)) {
        Replay::Term(e) => e,
        Replay::Var { steps, var } if steps == d0 => store.var(var),
        _ => return None,
    };
    Some(RootSplit {
        nonterminal: f,
        top,
        args,
    })
}

/// Performs the `side`-balancing step on `ρ`.
pub fn balance_step(
    o: &mut EqOracle,
    ctx: &PlayContext,
    rho: &Play,
    side: Side,
) -> Result<BalanceStep, PlayError> {
    let split = enables_balancing(o, rho, side, ctx.d0()).ok_or(PlayError::NotEnabled(side))?;
    let pivot = rho.term(side.other(), 0);
    let level = rho.finish_level();
    let g = o.shared_grammar();
    let mut reaches = Vec::with_capacity(split.args.len());
    let mut sigma = Substitution::new();
    for (k, &child) in split.args.iter().enumerate() {
        let var = k as u32 + 1;
        let reach = match ctx.sinks.get(split.nonterminal, var as usize) {
            None => Reach {
                var,
                word: Vec::new(),
                target: pivot,
            },
            Some(w) => {
                let labels = g.labels(w);
                let mut found = Vec::new();
                paths_by_labels(o, pivot, &labels, &mut Vec::new(), &mut found);
                let mut best: Option<(u32, Reach)> = None;
                for (word, target) in found {
                    let l = o.level_up_to(child, target, o.cutoff());
                    if best.as_ref().is_none_or(|b| l > b.0) {
                        best = Some((l, Reach { var, word, target }));
                    }
                }
                match best {
                    Some((l, r)) if l > level => r,
                    _ => return Err(PlayError::Starved { var, level }),
                }
            }
        };
        sigma.insert(o.store(), var, reach.target);
        reaches.push(reach);
    }
    let replaced = o.store_mut().apply(split.top, &sigma);
    let (t_end, u_end) = rho.finish();
    let result = match side {
        Side::Left => (replaced, u_end),
        Side::Right => (t_end, replaced),
    };
    let after = o.eq_level(result.0, result.1);
    if after != EqLevel::Finite(level) {
        return Err(PlayError::Unsound {
            before: level,
            after,
        });
    }
    Ok(BalanceStep {
        side,
        split,
        pivot,
        reaches,
        result,
        level,
    })
}

/// All rule paths from `t` whose labels spell `labels`, in lexicographic order.
fn paths_by_labels(
    o: &mut EqOracle,
    t: TermId,
    labels: &[crate::grammar::ActionId],
    prefix: &mut RuleWord,
    out: &mut Vec<(RuleWord, TermId)>,
) {
    let Some((&a, rest)) = labels.split_first() else {
        out.push((prefix.clone(), t));
        return;
    };
    for (r, s) in o.successors(t, a) {
        prefix.push(r);
        paths_by_labels(o, s, rest, prefix, out);
        prefix.pop();
    }
}

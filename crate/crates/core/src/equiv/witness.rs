//! Sink witnesses: if `eqlevel(E,F) = k < ℓ ≤ eqlevel(Eσ,Fσ)` then one of `E`,
//! `F` reaches a variable `x_i ∈ support(σ)` by a word `w` with `|w| ≤ k`,
//! the other side reaches `H ≠ x_i` by the same action word, and
//! `x_iσ ~_{ℓ-k} Hσ`. The search follows optimal attacker moves in the
//! unsubstituted pair and picks responses that keep the substituted pair high.

use crate::grammar::{ActionId, RuleWord};
use crate::terms::{Substitution, TermId};

use super::{EqLevel, EqOracle, EquivError, Side};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkWitness {
    /// Index `i` of the variable `x_i` reached.
    pub var: u32,
    /// The term `H` reached on the other side.
    pub other: TermId,
    /// Which of `E` (left) or `F` (right) sinks into the variable.
    pub var_side: Side,
    /// Rule word performed by the sinking side.
    pub var_word: RuleWord,
    /// Rule word performed by the other side; same labels as `var_word`.
    pub other_word: RuleWord,
}

impl SinkWitness {
    pub fn len(&self) -> usize {
        self.var_word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.var_word.is_empty()
    }

    /// Words performed from `E` and from `F`, in that order.
    pub fn words(&self) -> (&RuleWord, &RuleWord) {
        match self.var_side {
            Side::Left => (&self.var_word, &self.other_word),
            Side::Right => (&self.other_word, &self.var_word),
        }
    }

    pub fn action_word(&self, o: &EqOracle) -> Vec<ActionId> {
        o.grammar().labels(&self.var_word)
    }
}

impl EqOracle {
    /// Finds a sink witness for `eqlevel(E,F) = k` and `Eσ ~_ℓ Fσ`, `k < ℓ ≤ K`.
    pub fn find_sink_witness(
        &mut self,
        e: TermId,
        f: TermId,
        sigma: &Substitution,
        k: u32,
        l: u32,
    ) -> Result<SinkWitness, EquivError> {
        if l > self.cutoff() {
            return Err(EquivError::AboveCutoff { k: l, cutoff: self.cutoff() });
        }
        if k >= l {
            return Err(EquivError::Precondition(format!("need k < ℓ, got k={k}, ℓ={l}")));
        }
        if self.eq_level(e, f) != EqLevel::Finite(k) {
            return Err(EquivError::Precondition(format!("eqlevel(E,F) is not {k}")));
        }
        let es = self.store_mut().apply(e, sigma);
        let fs = self.store_mut().apply(f, sigma);
        if self.level_up_to(es, fs, l) < l {
            return Err(EquivError::Precondition(format!("Eσ and Fσ are not {l}-equivalent")));
        }
        let (mut cur_e, mut cur_f, mut k, mut l) = (e, f, k, l);
        let (mut we, mut wf) = (Vec::new(), Vec::new());
        while k > 0 {
            let mv = self.attacker_optimal(cur_e, cur_f)?;
            let a = self.grammar().label(mv.rule);
            let from = match mv.side {
                Side::Left => cur_f,
                Side::Right => cur_e,
            };
            let moved = self.store_mut().apply(mv.successor, sigma);
            let mut chosen = None;
            for (r, s) in self.successors(from, a) {
                let ss = self.store_mut().apply(s, sigma);
                if self.level_up_to(moved, ss, l - 1) >= l - 1 {
                    chosen = Some((r, s));
                    break;
                }
            }
            let (r, s) = chosen.ok_or_else(|| {
                EquivError::Precondition("substituted pair has no matching response".into())
            })?;
            let (ne, nf, re, rf) = match mv.side {
                Side::Left => (mv.successor, s, mv.rule, r),
                Side::Right => (s, mv.successor, r, mv.rule),
            };
            we.push(re);
            wf.push(rf);
            cur_e = ne;
            cur_f = nf;
            k = match self.eq_level(cur_e, cur_f) {
                EqLevel::Finite(x) => x,
                EqLevel::AtLeast(_) => unreachable!("optimal attack lowers the level"),
            };
            l -= 1;
        }
        let store = self.store();
        let (var_side, var, other) = match (store.is_var(cur_e), store.is_var(cur_f)) {
            (Some(i), _) if sigma.get(i).is_some() => (Side::Left, i, cur_f),
            (_, Some(j)) if sigma.get(j).is_some() => (Side::Right, j, cur_e),
            _ => {
                return Err(EquivError::Precondition(
                    "level-0 pair without a substituted variable".into(),
                ))
            }
        };
        let (var_word, other_word) = match var_side {
            Side::Left => (we, wf),
            Side::Right => (wf, we),
        };
        Ok(SinkWitness {
            var,
            other,
            var_side,
            var_word,
            other_word,
        })
    }
}

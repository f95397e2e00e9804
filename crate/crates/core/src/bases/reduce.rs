use crate::equiv::{EqLevel, EqOracle, SinkWitness};
use crate::terms::{Substitution, TermId};

use super::{next_size, BasesError, NsgParams, NsgSequence};

/// One reduction step: the witness found for the first element, the
/// iterated `H' = H[x_i/H][x_i/H]...`, and the shorter sequence over one
/// variable less.
#[derive(Clone, Debug)]
pub struct Reduction {
    pub witness: SinkWitness,
    pub h_omega: TermId,
    /// `k + 1` leading elements are dropped, `k = eqlevel(E1,F1)`.
    pub dropped: usize,
    pub seq: NsgSequence,
    pub params: NsgParams,
    /// Eq-levels of the retained elements, equal before and after.
    pub levels: Vec<u32>,
}

/// Removes `x_i` from an `(n,s,g)`-sequence whose first element is higher
/// than its top: substitutes `H'` for `x_i`, drops the first `k+1`
/// elements and renames `x_n` to `x_i`. The new size parameter uses the
/// observed `k` in place of `e`.
pub fn reduce_nsg_step(
    o: &mut EqOracle,
    seq: &NsgSequence,
    p: &NsgParams,
    stepinc: u64,
) -> Result<Reduction, BasesError> {
    if p.n == 0 {
        return Err(BasesError::Precondition("n = 0".into()));
    }
    let Some(&(e1, f1)) = seq.tops.first() else {
        return Err(BasesError::Precondition("empty sequence".into()));
    };
    let k = match o.eq_level(e1, f1) {
        EqLevel::Finite(k) => k,
        EqLevel::AtLeast(_) => {
            return Err(BasesError::Precondition("eqlevel(E1,F1) is not below the cutoff".into()))
        }
    };
    let levels = seq.levels(o)?;
    let l = levels[0];
    if k == l {
        return Err(BasesError::NothingToReduce(k));
    }
    let witness = o.find_sink_witness(e1, f1, &seq.tail, k, l)?;
    let i = witness.var;
    let n = p.n;
    let h_omega = o.store_mut().omega_iterate(witness.other, i);
    let dropped = (k as usize + 1).min(seq.len());
    let store = o.store_mut();
    let plug = Substitution::from_pairs(store, [(i, h_omega)]);
    let rename = if i == n {
        Substitution::new()
    } else {
        let xi = store.var(i);
        Substitution::from_pairs(store, [(n, xi)])
    };
    let tops: Vec<(TermId, TermId)> = seq.tops[dropped..]
        .iter()
        .map(|&(e, f)| {
            let e = store.apply(e, &plug);
            let f = store.apply(f, &plug);
            (store.apply(e, &rename), store.apply(f, &rename))
        })
        .collect();
    let mut tail = Substitution::new();
    for (v, t) in seq.tail.iter() {
        if v == i {
            continue;
        }
        if v == n {
            tail.insert(store, i, t);
        } else {
            tail.insert(store, v, t);
        }
    }
    let out = NsgSequence { tops, tail };
    let after = out.levels(o)?;
    let before = &levels[dropped..];
    if after != before {
        return Err(BasesError::Postcondition(format!(
            "retained eq-levels changed from {before:?} to {after:?}"
        )));
    }
    let params = NsgParams {
        n: n - 1,
        s: next_size(&p.s, &p.g, k, stepinc),
        g: p.g.clone(),
    };
    Ok(Reduction {
        witness,
        h_omega,
        dropped,
        seq: out,
        params,
        levels: after,
    })
}

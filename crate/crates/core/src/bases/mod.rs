//! `(n,s,g)`-sequences, candidates and bases, the bound `E_B`, the reduction
//! step that removes one variable from a sequence, and the brute-force search
//! for sound candidates at toy scale.

mod candidate;
mod enumerate;
mod reduce;
mod search;
mod stair;

use num_bigint::BigUint;
use serde::Serialize;
use thiserror::Error;

use crate::equiv::{EqLevel, EqOracle, EquivError};
use crate::grammar::GrammarConstants;
use crate::terms::{Substitution, TermId, TermStore};

pub use candidate::{bound_of_candidate, next_size, Bound, Candidate, Layer, PairInfo};
pub use enumerate::{pairs_with_prefix_vars, prefix_vars, terms_up_to};
pub use reduce::{reduce_nsg_step, Reduction};
pub use search::{
    build_full_base_capped, sound_candidate_search, speceq_check, speceq_threshold, Caps, FullBase,
    SearchStatus, SoundSearch,
};
pub use stair::{present_stair_as_nsg, StairSequence};

#[derive(Debug, Error)]
pub enum BasesError {
    #[error("eq-level of element {0} is not below the cutoff")]
    AboveCutoff(usize),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("eqlevel(E1,F1) = eqlevel(E1σ,F1σ) = {0}: nothing to reduce")]
    NothingToReduce(u32),
    #[error("postcondition violated: {0}")]
    Postcondition(String),
    #[error("crucial segment {0} is not a stair")]
    NotAStair(usize),
    #[error("the eq-level is at least {level} but the threshold is {threshold}: indeterminate")]
    Indeterminate { level: u32, threshold: BigUint },
    #[error("parameter n = {0} does not fit a variable index")]
    TooManyVariables(BigUint),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NsgParams {
    pub n: u32,
    #[serde(serialize_with = "decimal")]
    pub s: BigUint,
    #[serde(serialize_with = "decimal")]
    pub g: BigUint,
}

fn decimal<S: serde::Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_str_radix(10))
}

impl NsgParams {
    pub fn new(n: u32, s: u64, g: u64) -> Self {
        NsgParams {
            n,
            s: BigUint::from(s),
            g: BigUint::from(g),
        }
    }

    /// The grammar's own `n = m^d0`, `s` and `g`.
    pub fn from_constants(c: &GrammarConstants) -> Result<Self, BasesError> {
        let n = u32::try_from(&c.n).map_err(|_| BasesError::TooManyVariables(c.n.clone()))?;
        Ok(NsgParams {
            n,
            s: c.s.clone(),
            g: c.g.clone(),
        })
    }

    /// `s + g·(j-1)` for a 1-based position `j`.
    pub fn size_at(&self, j: usize) -> BigUint {
        &self.s + &self.g * BigUint::from(j.saturating_sub(1))
    }
}

/// Tops `(E_j,F_j)` with a shared tail `σ`; the elements are `(E_jσ, F_jσ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NsgSequence {
    pub tops: Vec<(TermId, TermId)>,
    pub tail: Substitution,
}

impl NsgSequence {
    pub fn len(&self) -> usize {
        self.tops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tops.is_empty()
    }

    pub fn elements(&self, store: &mut TermStore) -> Vec<(TermId, TermId)> {
        self.tops
            .iter()
            .map(|&(e, f)| (store.apply(e, &self.tail), store.apply(f, &self.tail)))
            .collect()
    }

    /// Eq-levels of the elements; errors on the first one at the cutoff.
    pub fn levels(&self, o: &mut EqOracle) -> Result<Vec<u32>, BasesError> {
        let elems = self.elements(o.store_mut());
        elems
            .iter()
            .enumerate()
            .map(|(j, &(a, b))| match o.eq_level(a, b) {
                EqLevel::Finite(k) => Ok(k),
                EqLevel::AtLeast(_) => Err(BasesError::AboveCutoff(j + 1)),
            })
            .collect()
    }
}

/// Every way in which `seq` fails to be an `(n,s,g)`-sequence.
pub fn nsg_problems(o: &mut EqOracle, seq: &NsgSequence, p: &NsgParams) -> Result<Vec<String>, BasesError> {
    let mut out = Vec::new();
    if seq.is_empty() {
        out.push("empty sequence".to_string());
        return Ok(out);
    }
    for (j, &(e, f)) in seq.tops.iter().enumerate() {
        let j = j + 1;
        if let Some(&x) = o.store().varin(&[e, f]).iter().find(|&&x| x > p.n) {
            out.push(format!("top {j} uses x{x} beyond x{}", p.n));
        }
        let size = o.store().pressize(&[e, f]);
        let cap = p.size_at(j);
        if BigUint::from(size) > cap {
            out.push(format!("top {j} has size {size} > {cap}"));
        }
    }
    let levels = seq.levels(o)?;
    for (j, w) in levels.windows(2).enumerate() {
        if w[1] >= w[0] {
            out.push(format!(
                "eq-levels {} and {} at positions {} and {} do not decrease",
                w[0],
                w[1],
                j + 1,
                j + 2
            ));
        }
    }
    Ok(out)
}

/// Variables, sizes and strictly decreasing finite eq-levels all check out.
pub fn check_nsg_sequence(o: &mut EqOracle, seq: &NsgSequence, p: &NsgParams) -> Result<bool, BasesError> {
    Ok(nsg_problems(o, seq, p)?.is_empty())
}

use std::collections::BTreeMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::terms::{TermId, TermStore};

use super::enumerate::prefix_vars;
use super::{BasesError, NsgParams};

/// `s' = 2s + g·(1+e) + e·stepinc`.
pub fn next_size(s: &BigUint, g: &BigUint, e: u32, stepinc: u64) -> BigUint {
    let e_big = BigUint::from(e);
    BigUint::from(2u32) * s + g * (BigUint::from(1u32) + &e_big) + e_big * BigUint::from(stepinc)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct PairInfo {
    /// `j` with `varin(E,F) = {x1..xj}`.
    pub vars: u32,
    pub size: usize,
    pub level: u32,
}

/// One layer `j` of a candidate: pairs over exactly `x1..xj`, the size
/// threshold `s_j` and `e_j`, the largest eq-level among pairs of the
/// remaining candidate within `s_j`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Layer {
    pub vars: u32,
    #[serde(serialize_with = "super::decimal")]
    pub size: BigUint,
    pub e: u32,
    pub members: usize,
}

/// A set of non-equivalent pairs, unordered, together with the parameters
/// that fix its layer thresholds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    pub params: NsgParams,
    pub stepinc: u64,
    pairs: BTreeMap<(TermId, TermId), PairInfo>,
}

fn key(e: TermId, f: TermId) -> (TermId, TermId) {
    if e <= f {
        (e, f)
    } else {
        (f, e)
    }
}

impl Candidate {
    pub fn empty(params: NsgParams, stepinc: u64) -> Self {
        Candidate {
            params,
            stepinc,
            pairs: BTreeMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, e: TermId, f: TermId) -> bool {
        self.pairs.contains_key(&key(e, f))
    }

    pub fn get(&self, e: TermId, f: TermId) -> Option<PairInfo> {
        self.pairs.get(&key(e, f)).copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = ((TermId, TermId), PairInfo)> + '_ {
        self.pairs.iter().map(|(&k, &v)| (k, v))
    }

    /// Adds a pair whose (finite) eq-level is already known. The variables
    /// must be exactly `x1..xj` for some `j ≤ n`.
    pub fn insert(&mut self, store: &TermStore, e: TermId, f: TermId, level: u32) -> Result<(), BasesError> {
        let vars = prefix_vars(store, e, f).ok_or_else(|| {
            BasesError::Precondition(format!(
                "variables of ({}, {}) are not x1..xj",
                store.display(e),
                store.display(f)
            ))
        })?;
        if vars > self.params.n {
            return Err(BasesError::Precondition(format!(
                "pair uses x{vars}, beyond n = {}",
                self.params.n
            )));
        }
        let size = store.pressize(&[e, f]);
        self.pairs.insert(key(e, f), PairInfo { vars, size, level });
        Ok(())
    }

    /// Layers from `j = n` down to `0`.
    pub fn layers(&self) -> Vec<Layer> {
        let mut out = Vec::with_capacity(self.params.n as usize + 1);
        let mut s = self.params.s.clone();
        for j in (0..=self.params.n).rev() {
            let within = |i: &PairInfo| i.vars <= j && BigUint::from(i.size) <= s;
            let e = self.pairs.values().filter(|i| within(i)).map(|i| i.level).max().unwrap_or(0);
            let members = self.pairs.values().filter(|i| i.vars == j).count();
            let next = next_size(&s, &self.params.g, e, self.stepinc);
            out.push(Layer {
                vars: j,
                size: s,
                e,
                members,
            });
            s = next;
        }
        out
    }

    /// Pairs over `x1..xj` larger than the threshold `s_j`.
    pub fn problems(&self) -> Vec<String> {
        let layers = self.layers();
        let mut out = Vec::new();
        for ((e, f), i) in self.pairs() {
            let layer = &layers[(self.params.n - i.vars) as usize];
            if BigUint::from(i.size) > layer.size {
                out.push(format!(
                    "pair ({e:?},{f:?}) over x1..x{} has size {} > {}",
                    i.vars, i.size, layer.size
                ));
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Bound {
    #[serde(serialize_with = "super::decimal")]
    pub value: BigUint,
    pub layers: Vec<Layer>,
}

/// `E_B = 1 + e` at `n = 0` and `1 + e + E_B'` above.
pub fn bound_of_candidate(c: &Candidate) -> Bound {
    let layers = c.layers();
    let value = layers
        .iter()
        .map(|l| BigUint::from(1u32) + BigUint::from(l.e))
        .sum();
    Bound { value, layers }
}

use std::collections::BTreeMap;

use super::{TermId, TermStore};

/// Finite-support substitution. Identity bindings `x_i ↦ x_i` are never stored,
/// so the key set is exactly the support.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Substitution {
    map: BTreeMap<u32, TermId>,
}

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs(store: &TermStore, pairs: impl IntoIterator<Item = (u32, TermId)>) -> Self {
        let mut s = Self::new();
        for (i, t) in pairs {
            s.insert(store, i, t);
        }
        s
    }

    /// Binds `x_i ↦ t`, or removes the binding when `t` is `x_i` itself.
    pub fn insert(&mut self, store: &TermStore, i: u32, t: TermId) {
        if store.is_var(t) == Some(i) {
            self.map.remove(&i);
        } else {
            self.map.insert(i, t);
        }
    }

    pub fn remove(&mut self, i: u32) -> Option<TermId> {
        self.map.remove(&i)
    }

    pub fn get(&self, i: u32) -> Option<TermId> {
        self.map.get(&i).copied()
    }

    pub fn support(&self) -> impl Iterator<Item = u32> + '_ {
        self.map.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, TermId)> + '_ {
        self.map.iter().map(|(&i, &t)| (i, t))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

impl TermStore {
    /// `x(σ1σ2) = (xσ1)σ2`.
    pub fn compose(&mut self, first: &Substitution, second: &Substitution) -> Substitution {
        let mut out = Substitution::new();
        for (i, t) in first.iter() {
            let img = self.apply(t, second);
            out.insert(self, i, img);
        }
        for (i, t) in second.iter() {
            if first.get(i).is_none() {
                out.insert(self, i, t);
            }
        }
        out
    }

    /// Image of `x_i` under `σ`, interning the variable if needed.
    pub fn image(&mut self, i: u32, sigma: &Substitution) -> TermId {
        sigma.get(i).unwrap_or_else(|| self.var(i))
    }
}

use std::collections::HashMap;

use num_bigint::BigUint;
use serde::Serialize;

use crate::equiv::{EqLevel, EqOracle};
use crate::terms::TermId;

use super::{
    bound_of_candidate, pairs_with_prefix_vars, terms_up_to, BasesError, Bound, Candidate, NsgParams,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Caps {
    /// Largest `pressize(E,F)` enumerated.
    pub max_size: usize,
    /// State budget for deciding pairs that reach the cutoff.
    pub certify: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_size: 4,
            certify: 20_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Verdict {
    Distinct(u32),
    Equivalent,
    /// At the cutoff without a certificate either way, or certified
    /// non-equivalent with an unknown level.
    Unknown,
}

fn verdict(o: &mut EqOracle, memo: &mut HashMap<(TermId, TermId), Verdict>, e: TermId, f: TermId, cap: usize) -> Verdict {
    if let Some(&v) = memo.get(&(e, f)) {
        return v;
    }
    let v = match o.eq_level(e, f) {
        EqLevel::Finite(k) => Verdict::Distinct(k),
        EqLevel::AtLeast(_) => match o.certify_bisimilar(e, f, cap) {
            Some(true) => Verdict::Equivalent,
            _ => Verdict::Unknown,
        },
    };
    memo.insert((e, f), v);
    v
}

#[derive(Clone, Debug)]
pub struct FullBase {
    pub candidate: Candidate,
    pub bound: Bound,
    /// Neither the size cap nor an undecided pair got in the way.
    pub complete: bool,
    /// Some layer threshold exceeded the size cap.
    pub capped: bool,
    /// Pairs at the cutoff that could not be decided; left out.
    pub undecided: Vec<(TermId, TermId)>,
}

/// The full candidate `B_{n,s,g}` restricted to pairs of size at most the cap.
pub fn build_full_base_capped(o: &mut EqOracle, p: &NsgParams, stepinc: u64, caps: Caps) -> FullBase {
    let terms = terms_up_to(o.store_mut(), caps.max_size, p.n);
    let mut memo = HashMap::new();
    let mut cand = Candidate::empty(p.clone(), stepinc);
    let mut capped = false;
    let mut undecided = Vec::new();
    for j in (0..=p.n).rev() {
        // Every pair within an upper threshold went in at its own step, so
        // the layers above, and with them `s_j`, are final.
        let s_j = cand.layers()[(p.n - j) as usize].size.clone();
        let limit = match usize::try_from(&s_j) {
            Ok(s) if s <= caps.max_size => s,
            _ => {
                capped = true;
                caps.max_size
            }
        };
        for i in 0..=j {
            for (e, f) in pairs_with_prefix_vars(o.store(), &terms, i, limit) {
                if cand.contains(e, f) {
                    continue;
                }
                match verdict(o, &mut memo, e, f, caps.certify) {
                    Verdict::Distinct(k) => cand
                        .insert(o.store(), e, f, k)
                        .expect("enumerated pairs have prefix variables"),
                    Verdict::Equivalent => {}
                    Verdict::Unknown => {
                        if !undecided.contains(&(e, f)) {
                            undecided.push((e, f))
                        }
                    }
                }
            }
        }
    }
    let bound = bound_of_candidate(&cand);
    FullBase {
        complete: !capped && undecided.is_empty(),
        candidate: cand,
        bound,
        capped,
        undecided,
    }
}

/// `c·(k·pressize(T,U) + pressize(T,U)²)`.
pub fn speceq_threshold(o: &EqOracle, t: TermId, u: TermId, k: &BigUint, c: &BigUint) -> BigUint {
    let ps = BigUint::from(o.store().pressize(&[t, u]));
    c * (k * &ps + &ps * &ps)
}

/// Whether `eqlevel(T,U)` exceeds the threshold. A level at the cutoff
/// answers only if the cutoff already exceeds the threshold or the pair is
/// certified equivalent within `certify` states.
pub fn speceq_check(
    o: &mut EqOracle,
    t: TermId,
    u: TermId,
    k: &BigUint,
    c: &BigUint,
    certify: usize,
) -> Result<bool, BasesError> {
    let threshold = speceq_threshold(o, t, u, k, c);
    match o.eq_level(t, u) {
        EqLevel::Finite(e) => Ok(BigUint::from(e) > threshold),
        EqLevel::AtLeast(level) => {
            if BigUint::from(level) > threshold || o.certify_bisimilar(t, u, certify) == Some(true) {
                Ok(true)
            } else {
                Err(BasesError::Indeterminate { level, threshold })
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchStatus {
    Sound,
    Indeterminate,
    Capped,
}

#[derive(Clone, Debug)]
pub struct SoundSearch {
    pub candidate: Candidate,
    pub bound: Bound,
    pub status: SearchStatus,
    pub iterations: usize,
}

/// Grows a candidate from empty: every enumerated pair outside it that fails
/// the threshold test at `E_B` joins its layer; stops at a fixpoint.
pub fn sound_candidate_search(
    o: &mut EqOracle,
    p: &NsgParams,
    stepinc: u64,
    c: &BigUint,
    caps: Caps,
) -> SoundSearch {
    let terms = terms_up_to(o.store_mut(), caps.max_size, p.n);
    let mut cand = Candidate::empty(p.clone(), stepinc);
    let mut iterations = 0;
    loop {
        iterations += 1;
        let bound = bound_of_candidate(&cand);
        let mut capped = false;
        let mut violators = Vec::new();
        for layer in &bound.layers {
            let limit = match usize::try_from(&layer.size) {
                Ok(s) if s <= caps.max_size => s,
                _ => {
                    capped = true;
                    caps.max_size
                }
            };
            for (e, f) in pairs_with_prefix_vars(o.store(), &terms, layer.vars, limit) {
                if cand.contains(e, f) {
                    continue;
                }
                match speceq_check(o, e, f, &bound.value, c, caps.certify) {
                    Ok(true) => {}
                    Ok(false) => {
                        let k = o.eq_level(e, f).finite().expect("below the threshold");
                        violators.push((e, f, k));
                    }
                    Err(_) => {
                        return SoundSearch {
                            candidate: cand,
                            bound,
                            status: SearchStatus::Indeterminate,
                            iterations,
                        }
                    }
                }
            }
        }
        if violators.is_empty() {
            let status = if capped {
                SearchStatus::Capped
            } else {
                SearchStatus::Sound
            };
            return SoundSearch {
                candidate: cand,
                bound,
                status,
                iterations,
            };
        }
        for (e, f, k) in violators {
            cand.insert(o.store(), e, f, k).expect("enumerated pairs have prefix variables");
        }
    }
}

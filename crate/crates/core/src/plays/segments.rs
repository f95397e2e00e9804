use std::collections::HashSet;

use crate::equiv::Side;
use crate::lts::PathRecord;
use crate::terms::{TermId, TermStore};

use super::{BalancedPlay, PivotPath};

/// The part `ρ'_{k_j} μ^unc ... μ^usink_{k_{j+1}-1}` of a balanced play that
/// starts at the close pivot `W_{k_j}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrucialSegment {
    /// `k_j`, a 1-based pivot index.
    pub first: usize,
    /// `k_{j+1}`; the index length is `end - first`.
    pub end: usize,
    /// Number of play steps in the segment.
    pub length: usize,
    /// `V_{k_j - 1} -> W_{k_j} -> ... -> W_{k_{j+1}-1}` on the pivot path.
    pub stair: PathRecord,
}

impl CrucialSegment {
    pub fn index_len(&self) -> usize {
        self.end - self.first
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Segmentation {
    pub subterms: HashSet<TermId>,
    /// `length(μ^csink_j)` for `j` in `0..=ℓ`.
    pub csink: Vec<usize>,
    /// `length(μ^usink_j)` for `j` in `0..=ℓ` (the entry for 0 is always 0).
    pub usink: Vec<usize>,
    /// For each pivot-path segment `w_j`, the last position visiting a
    /// subterm of the start pair.
    pub last_visit: Vec<Option<usize>>,
    /// The close pivots `k_1 < ... < k_p`.
    pub close: Vec<usize>,
    pub crucial: Vec<CrucialSegment>,
}

/// Splits the sinking parts into unclear and close parts, finds the close
/// pivots and cuts the balanced play into crucial segments.
pub fn refine_segments(store: &TermStore, b: &BalancedPlay, path: &PivotPath) -> Segmentation {
    let subterms = store.subterms(&[b.start.0, b.start.1]);
    let visits = |p: &PathRecord| p.states.iter().position(|s| subterms.contains(s));
    let ell = b.phases.len();
    let mut csink = vec![b.mu0.len()];
    let mut usink = vec![0];
    for ph in &b.phases {
        let (u, c) = match ph.sinking() {
            None => (0, 0),
            Some(d) => match (visits(&d.path(Side::Left)), visits(&d.path(Side::Right))) {
                (Some(a), Some(e)) => {
                    let q = a.max(e);
                    (q, d.len() - q)
                }
                _ => (d.len(), 0),
            },
        };
        usink.push(u);
        csink.push(c);
    }
    let last_visit: Vec<Option<usize>> = path
        .segments
        .iter()
        .map(|s| s.path.states.iter().rposition(|t| subterms.contains(t)))
        .collect();
    let close: Vec<usize> = (1..=ell).filter(|&j| last_visit[j - 1].is_some()).collect();
    let mut crucial = Vec::with_capacity(close.len());
    for (i, &k) in close.iter().enumerate() {
        let end = close.get(i + 1).copied().unwrap_or(ell + 1);
        let length = (k..end)
            .map(|t| {
                let ph = &b.phases[t - 1];
                ph.rho.len() + ph.unclear_len() + usink[t]
            })
            .sum();
        let head = &path.segments[k - 1].path;
        let from = last_visit[k - 1].expect("close pivots have a visit");
        let mut stair = head.slice(from, head.len());
        for seg in &path.segments[k..end - 1] {
            stair.word.extend_from_slice(&seg.path.word);
            stair.states.extend_from_slice(&seg.path.states[1..]);
        }
        crucial.push(CrucialSegment {
            first: k,
            end,
            length,
            stair,
        });
    }
    Segmentation {
        subterms,
        csink,
        usink,
        last_visit,
        close,
        crucial,
    }
}

impl Segmentation {
    pub fn csink_total(&self) -> usize {
        self.csink.iter().sum()
    }

    /// Segment kinds in order, as `(kind, pivot index, length)`.
    pub fn layout(&self, b: &BalancedPlay) -> Vec<(&'static str, usize, usize)> {
        let mut out = vec![("csink", 0, self.csink[0])];
        for (j, ph) in b.phases.iter().enumerate() {
            let j = j + 1;
            out.push(("rho", j, ph.rho.len()));
            out.push(("unc", j, ph.unclear_len()));
            out.push(("usink", j, self.usink[j]));
            out.push(("csink", j, self.csink[j]));
        }
        out
    }
}

//! Optimal plays of the bisimulation game, modified plays glued by
//! eqlevel-concatenation, balancing steps, the transformation to balanced
//! modified plays with their pivot paths, and the segment analysis.

mod balance;
mod segments;
mod top;
mod transform;
mod verify;

use thiserror::Error;

use crate::equiv::{EqLevel, EqOracle, EquivError, Side};
use crate::grammar::{Grammar, GrammarConstants, RuleId, RuleWord, SinkTable};
use crate::lts::PathRecord;
use crate::terms::TermId;

pub use balance::{balance_step, enables_balancing, BalanceStep, Reach, RootSplit};
pub use segments::{refine_segments, CrucialSegment, Segmentation};
pub use top::{bal_result_tops, top_form, TopForm};
pub use transform::{transform_to_balanced, BalancedPlay, Phase, PivotPath, PivotSegment};
pub use verify::{verify_balanced, Check, Report};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlayError {
    #[error("the pair is not distinguished below the cutoff {0}")]
    AboveCutoff(u32),
    #[error("no term reachable from the pivot keeps position {var} above level {level}")]
    Starved { var: u32, level: u32 },
    #[error("the play does not enable {0:?}-balancing")]
    NotEnabled(Side),
    #[error("balancing changed the eq-level from {before} to {after}")]
    Unsound { before: u32, after: EqLevel },
    #[error("eqlevel-concatenation needs equal levels, got {0} and {1}")]
    LevelMismatch(u32, u32),
    #[error("segment {0} of the pivot path is not a stair")]
    NotAStair(usize),
    #[error(transparent)]
    Equiv(#[from] EquivError),
}

/// Grammar-level data needed by balancing and its analysis.
#[derive(Clone, Debug)]
pub struct PlayContext {
    pub sinks: SinkTable,
    pub consts: GrammarConstants,
}

impl PlayContext {
    pub fn new(g: &Grammar) -> Self {
        let sinks = SinkTable::compute(g);
        let consts = GrammarConstants::compute(g, &sinks);
        PlayContext { sinks, consts }
    }

    pub fn d0(&self) -> usize {
        self.consts.d0_len()
    }
}

/// A play `(T0,U0) -(r1,r1')-> ... -(rk,rk')-> (Tk,Uk)` together with the
/// eq-level of every pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Play {
    pub pairs: Vec<(TermId, TermId)>,
    pub levels: Vec<u32>,
    pub left: RuleWord,
    pub right: RuleWord,
}

impl Play {
    pub fn trivial(t: TermId, u: TermId, level: u32) -> Self {
        Play {
            pairs: vec![(t, u)],
            levels: vec![level],
            left: Vec::new(),
            right: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    pub fn start(&self) -> (TermId, TermId) {
        self.pairs[0]
    }

    pub fn finish(&self) -> (TermId, TermId) {
        *self.pairs.last().expect("plays are nonempty")
    }

    pub fn start_level(&self) -> u32 {
        self.levels[0]
    }

    pub fn finish_level(&self) -> u32 {
        *self.levels.last().expect("plays are nonempty")
    }

    pub fn word(&self, side: Side) -> &[RuleId] {
        match side {
            Side::Left => &self.left,
            Side::Right => &self.right,
        }
    }

    pub fn term(&self, side: Side, pos: usize) -> TermId {
        match side {
            Side::Left => self.pairs[pos].0,
            Side::Right => self.pairs[pos].1,
        }
    }

    pub fn path(&self, side: Side) -> PathRecord {
        PathRecord {
            word: self.word(side).to_vec(),
            states: (0..self.pairs.len()).map(|k| self.term(side, k)).collect(),
        }
    }

    /// The subplay between positions `from` and `to`.
    pub fn slice(&self, from: usize, to: usize) -> Play {
        Play {
            pairs: self.pairs[from..=to].to_vec(),
            levels: self.levels[from..=to].to_vec(),
            left: self.left[from..to].to_vec(),
            right: self.right[from..to].to_vec(),
        }
    }

    /// Standard concatenation; `next` must start where `self` finishes.
    pub fn concat(&self, next: &Play) -> Play {
        assert_eq!(self.finish(), next.start(), "plays do not meet");
        let mut out = self.clone();
        out.pairs.extend_from_slice(&next.pairs[1..]);
        out.levels.extend_from_slice(&next.levels[1..]);
        out.left.extend_from_slice(&next.left);
        out.right.extend_from_slice(&next.right);
        out
    }
}

/// Completed optimal play from `(t,u)`: attacker-optimal moves answered by
/// defender-optimal responses until level 0.
pub fn build_optimal_play(o: &mut EqOracle, t: TermId, u: TermId) -> Result<Play, PlayError> {
    let k = o.eq_level(t, u).finite().ok_or(PlayError::AboveCutoff(o.cutoff()))?;
    let mut play = Play::trivial(t, u, k);
    let (mut cur_t, mut cur_u) = (t, u);
    for level in (0..k).rev() {
        let mv = o.attacker_optimal(cur_t, cur_u)?;
        let (r, s) = o.defender_optimal(cur_t, cur_u, &mv)?;
        let (nt, nu, rt, ru) = match mv.side {
            Side::Left => (mv.successor, s, mv.rule, r),
            Side::Right => (s, mv.successor, r, mv.rule),
        };
        debug_assert_eq!(o.eq_level(nt, nu), EqLevel::Finite(level));
        play.pairs.push((nt, nu));
        play.levels.push(level);
        play.left.push(rt);
        play.right.push(ru);
        cur_t = nt;
        cur_u = nu;
    }
    Ok(play)
}

/// A sequence of plays where each play starts at the eq-level at which the
/// previous one finishes, from a different pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModifiedPlay {
    pub plays: Vec<Play>,
}

impl ModifiedPlay {
    pub fn single(p: Play) -> Self {
        ModifiedPlay { plays: vec![p] }
    }

    pub fn len(&self) -> usize {
        self.plays.iter().map(Play::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn start(&self) -> (TermId, TermId) {
        self.plays[0].start()
    }

    pub fn finish(&self) -> (TermId, TermId) {
        self.plays.last().expect("nonempty").finish()
    }

    /// All pairs in order of appearance; merged boundaries appear once.
    pub fn pairs(&self) -> Vec<(TermId, TermId)> {
        self.plays.iter().flat_map(|p| p.pairs.iter().copied()).collect()
    }

    pub fn is_completed(&self) -> bool {
        self.plays.last().is_some_and(|p| p.finish_level() == 0)
    }

    /// Eqlevel-concatenation `self ⊙ next`.
    pub fn econc(&self, next: &ModifiedPlay) -> Result<ModifiedPlay, PlayError> {
        let last = self.plays.last().expect("nonempty");
        let first = &next.plays[0];
        if last.finish_level() != first.start_level() {
            return Err(PlayError::LevelMismatch(last.finish_level(), first.start_level()));
        }
        let mut plays = self.plays.clone();
        if last.finish() == first.start() {
            let merged = last.concat(first);
            *plays.last_mut().expect("nonempty") = merged;
            plays.extend(next.plays[1..].iter().cloned());
        } else {
            plays.extend(next.plays.iter().cloned());
        }
        Ok(ModifiedPlay { plays }.normalized())
    }

    /// Collapses bridges of zero-length plays that return to an earlier pair.
    pub fn normalized(mut self) -> Self {
        let mut j = 0;
        while j < self.plays.len() {
            let fin = self.plays[j].finish();
            let hit = (j + 1..self.plays.len()).find(|&q| self.plays[q].start() == fin);
            match hit {
                Some(q) if q > j + 1 && self.plays[j + 1..q].iter().all(Play::is_empty) => {
                    let merged = self.plays[j].concat(&self.plays[q]);
                    self.plays.splice(j..=q, [merged]);
                }
                _ => j += 1,
            }
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::grammar::parse_grammar;

    fn counter() -> EqOracle {
        let g = parse_grammar(
            "nonterminals: A/1, Z/0\nactions: a, b\nrule r1: A(x1) -a-> x1\nrule r2: Z -b-> Z\n",
        )
        .unwrap();
        EqOracle::new(Arc::new(g), 20)
    }

    #[test]
    fn optimal_play_has_level_length() {
        let mut o = counter();
        let t = o.parse("A(A(A(Z)))").unwrap();
        let u = o.parse("A(Z)").unwrap();
        let p = build_optimal_play(&mut o, t, u).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.finish_level(), 0);
        assert_eq!(p.levels, vec![1, 0]);
    }

    #[test]
    fn econc_merges_meeting_plays() {
        let mut o = counter();
        let t = o.parse("A(A(Z))").unwrap();
        let u = o.parse("A(A(A(Z)))").unwrap();
        let p = build_optimal_play(&mut o, t, u).unwrap();
        let a = ModifiedPlay::single(p.slice(0, 1));
        let b = ModifiedPlay::single(p.slice(1, 2));
        let ab = a.econc(&b).unwrap();
        assert_eq!(ab.plays.len(), 1);
        assert_eq!(ab.len(), 2);
    }
}

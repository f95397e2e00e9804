//! The rule-based and action-based transition systems generated by a grammar,
//! plus path predicates: sink segments, d0-sinking paths and stairs.

use thiserror::Error;

use crate::grammar::{ActionId, Grammar, RuleId, RuleWord};
use crate::terms::{TermId, TermStore};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LtsError {
    #[error("word is not performable from the given term (stuck after {0} step(s))")]
    NotPerformable(usize),
    #[error("word is not a stair")]
    NotAStair,
}

/// A performed path `start -word-> end`; `states` has `word.len() + 1` entries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathRecord {
    pub word: RuleWord,
    pub states: Vec<TermId>,
}

impl PathRecord {
    pub fn start(&self) -> TermId {
        self.states[0]
    }

    pub fn end(&self) -> TermId {
        *self.states.last().expect("nonempty")
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn intermediates(&self) -> &[TermId] {
        if self.states.len() <= 2 {
            &[]
        } else {
            &self.states[1..self.states.len() - 1]
        }
    }

    /// The sub-path between positions `from` and `to`.
    pub fn slice(&self, from: usize, to: usize) -> PathRecord {
        PathRecord {
            word: self.word[from..to].to_vec(),
            states: self.states[from..=to].to_vec(),
        }
    }
}

/// `t -r-> t'` in the rule LTS; `None` when the root of `t` is not `lhs(r)`.
pub fn step_rule(g: &Grammar, store: &mut TermStore, t: TermId, r: RuleId) -> Option<TermId> {
    let rule = g.rule(r);
    if store.root(t)? != rule.lhs {
        return None;
    }
    let args: Vec<TermId> = store.children(t).to_vec();
    Some(rule.rhs.instantiate(store, &args))
}

/// All rule transitions of `t`, in rule-id order.
pub fn transitions(g: &Grammar, store: &mut TermStore, t: TermId) -> Vec<(RuleId, TermId)> {
    let Some(f) = store.root(t) else {
        return Vec::new();
    };
    let args: Vec<TermId> = store.children(t).to_vec();
    g.rules_for(f)
        .iter()
        .map(|&r| (r, g.rule(r).rhs.instantiate(store, &args)))
        .collect()
}

/// `t -a-> t'` in the action LTS, with the rule that induces each step.
pub fn step_action(g: &Grammar, store: &mut TermStore, t: TermId, a: ActionId) -> Vec<(RuleId, TermId)> {
    let Some(f) = store.root(t) else {
        return Vec::new();
    };
    let args: Vec<TermId> = store.children(t).to_vec();
    g.rules_for(f)
        .iter()
        .filter(|&&r| g.label(r) == a)
        .map(|&r| (r, g.rule(r).rhs.instantiate(store, &args)))
        .collect()
}

pub fn run_word(g: &Grammar, store: &mut TermStore, t: TermId, w: &[RuleId]) -> Option<PathRecord> {
    let mut states = Vec::with_capacity(w.len() + 1);
    states.push(t);
    let mut cur = t;
    for &r in w {
        cur = step_rule(g, store, cur, r)?;
        states.push(cur);
    }
    Some(PathRecord {
        word: w.to_vec(),
        states,
    })
}

/// Outcome of replaying a word over the abstract term `A(x1,...,xm)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Replay {
    /// The whole word was performed, ending in a nonterminal-rooted term.
    Term(TermId),
    /// A variable was reached after `steps` steps (possibly before the end of the word).
    Var { steps: usize, var: u32 },
    /// A rule did not apply after `steps` steps.
    Stuck { steps: usize },
}

/// Replays `w` from `from`, stopping at the first variable.
pub fn replay(g: &Grammar, store: &mut TermStore, from: TermId, w: &[RuleId]) -> Replay {
    let mut cur = from;
    for (k, &r) in w.iter().enumerate() {
        if let Some(i) = store.is_var(cur) {
            return Replay::Var { steps: k, var: i };
        }
        match step_rule(g, store, cur, r) {
            Some(next) => cur = next,
            None => return Replay::Stuck { steps: k },
        }
    }
    match store.is_var(cur) {
        Some(i) => Replay::Var {
            steps: w.len(),
            var: i,
        },
        None => Replay::Term(cur),
    }
}

/// Length of the sink-segment prefix of `w` from a term rooted like `t`, if any.
/// Sink segments from a fixed root are prefix-free, so it is unique.
pub fn sink_prefix(g: &Grammar, store: &mut TermStore, t: TermId, w: &[RuleId]) -> Option<(usize, u32)> {
    let f = store.root(t)?;
    let lhs = store.abstract_lhs(f);
    match replay(g, store, lhs, w) {
        Replay::Var { steps, var } if steps > 0 => Some((steps, var)),
        _ => None,
    }
}

/// `p` is `A(x1..xm)σ -v-> x_iσ` with `A(x1..xm) -v-> x_i` and `v` nonempty.
pub fn is_sink_segment(g: &Grammar, store: &mut TermStore, p: &PathRecord) -> bool {
    match sink_prefix(g, store, p.start(), &p.word) {
        Some((steps, var)) => {
            steps == p.len() && store.children(p.start()).get(var as usize - 1) == Some(&p.end())
        }
        None => false,
    }
}

/// `p` factors into sink segments shorter than `d0` followed by a residue shorter than `d0`.
pub fn is_d0_sinking(g: &Grammar, store: &mut TermStore, p: &PathRecord, d0: usize) -> bool {
    let mut pos = 0;
    loop {
        if p.len() - pos < d0 {
            return true;
        }
        match sink_prefix(g, store, p.states[pos], &p.word[pos..]) {
            Some((k, _)) if k < d0 => pos += k,
            _ => return false,
        }
    }
}

/// `v` is empty, or `v = r v'` and replaying `v` from `lhs(r)(x1..xm)` ends in a non-variable.
pub fn is_stair(g: &Grammar, store: &mut TermStore, w: &[RuleId]) -> bool {
    let Some(&first) = w.first() else {
        return true;
    };
    let lhs = store.abstract_lhs(g.rule(first).lhs);
    matches!(replay(g, store, lhs, w), Replay::Term(_))
}

/// `v = r v'` where `v'` is a concatenation of sink segments leading from
/// `rhs(r)` to a nonterminal-rooted subterm of `rhs(r)`.
pub fn is_simple_stair(g: &Grammar, store: &mut TermStore, w: &[RuleId]) -> bool {
    let Some(&first) = w.first() else {
        return false;
    };
    let lhs = store.abstract_lhs(g.rule(first).lhs);
    let Some(path) = run_word(g, store, lhs, w) else {
        return false;
    };
    let top = path.states[1];
    let mut pos = 1;
    while pos < path.len() {
        match sink_prefix(g, store, path.states[pos], &path.word[pos..]) {
            Some((k, _)) => pos += k,
            None => return false,
        }
    }
    let end = path.end();
    store.is_var(end).is_none() && store.subterms(&[top]).contains(&end)
}

/// Factorizes a stair into simple stairs: repeatedly cut the shortest nonempty
/// prefix whose remainder is still a stair.
pub fn simple_stair_decompose(
    g: &Grammar,
    store: &mut TermStore,
    p: &PathRecord,
) -> Result<Vec<RuleWord>, LtsError> {
    if !is_stair(g, store, &p.word) {
        return Err(LtsError::NotAStair);
    }
    let mut pieces = Vec::new();
    let mut pos = 0;
    while pos < p.len() {
        let cut = (pos + 1..=p.len())
            .find(|&k| is_stair(g, store, &p.word[k..]))
            .expect("the empty suffix is a stair");
        pieces.push(p.word[pos..cut].to_vec());
        pos = cut;
    }
    Ok(pieces)
}

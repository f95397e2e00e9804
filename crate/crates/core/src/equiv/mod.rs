//! Bounded bisimulation game on the action LTS.
//!
//! `eqlevel(T,U)` is the largest `k` with `T ~_k U`. The oracle computes it
//! below a mandatory cutoff `K` and answers [`EqLevel::AtLeast`] otherwise; it
//! never claims full equivalence. A separate, explicitly bounded finite-state
//! check ([`EqOracle::certify_bisimilar`]) can confirm equivalence when the
//! reachable state space happens to be small.

mod witness;

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap, VecDeque};
use std::sync::Arc;

use thiserror::Error;

use crate::grammar::{ActionId, Grammar, RuleId};
use crate::lts;
use crate::terms::{Substitution, TermError, TermId, TermStore};

pub use witness::SinkWitness;

/// An equivalence level in `ℕ ∪ {ω}`; `Omega` is above every finite level and
/// absorbs additions and subtractions.
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Level {
    Finite(u32),
    Omega,
}

impl Level {
    pub fn plus(self, n: u32) -> Level {
        match self {
            Level::Finite(k) => Level::Finite(k + n),
            Level::Omega => Level::Omega,
        }
    }

    /// Subtraction, saturating at 0 for finite levels.
    pub fn minus(self, n: u32) -> Level {
        match self {
            Level::Finite(k) => Level::Finite(k.saturating_sub(n)),
            Level::Omega => Level::Omega,
        }
    }
}

/// Answer of a cutoff-`K` oracle: exact below `K`, otherwise only a lower bound.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, serde::Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum EqLevel {
    Finite(u32),
    AtLeast(u32),
}

impl EqLevel {
    pub fn finite(self) -> Option<u32> {
        match self {
            EqLevel::Finite(e) => Some(e),
            EqLevel::AtLeast(_) => None,
        }
    }

    /// Lower bound implied by the answer.
    pub fn lower_bound(self) -> u32 {
        match self {
            EqLevel::Finite(e) | EqLevel::AtLeast(e) => e,
        }
    }
}

impl PartialOrd for EqLevel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for EqLevel {
    fn cmp(&self, other: &Self) -> Ordering {
        let key = |l: &EqLevel| match *l {
            EqLevel::Finite(e) => (e, 0),
            EqLevel::AtLeast(e) => (e, 1),
        };
        key(self).cmp(&key(other))
    }
}

impl std::fmt::Display for EqLevel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EqLevel::Finite(e) => write!(f, "finite {e}"),
            EqLevel::AtLeast(k) => write!(f, "at-least {k}"),
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Side::Left => 'L',
            Side::Right => 'R',
        }
    }
}

/// A transition chosen by the attacker in one of the two terms.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct AttackerMove {
    pub side: Side,
    pub rule: RuleId,
    pub successor: TermId,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EquivError {
    #[error("level {k} exceeds the oracle cutoff {cutoff}")]
    AboveCutoff { k: u32, cutoff: u32 },
    #[error("the pair is not distinguished below the cutoff {0}")]
    NotDistinguished(u32),
    #[error("the pair has eq-level 0; there is nothing to play")]
    LevelZero,
    #[error("no defender response with the attacker's action")]
    NoResponse,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Copy, Clone, Debug)]
enum Known {
    Exact(u32),
    AtLeast(u32),
}

type Transitions = Arc<[(ActionId, RuleId, TermId)]>;
type Memo = HashMap<(TermId, TermId), Known>;

/// Memoizing eq-level oracle; owns the term store all its answers refer to.
#[derive(Clone)]
pub struct EqOracle {
    grammar: Arc<Grammar>,
    store: TermStore,
    cutoff: u32,
    memo: Memo,
    trans: HashMap<TermId, Transitions>,
}

impl EqOracle {
    pub fn new(grammar: Arc<Grammar>, cutoff: u32) -> Self {
        let store = grammar.new_store();
        Self::with_store(grammar, store, cutoff)
    }

    pub fn with_store(grammar: Arc<Grammar>, store: TermStore, cutoff: u32) -> Self {
        assert!(cutoff >= 1, "the cutoff must be positive");
        EqOracle {
            grammar,
            store,
            cutoff,
            memo: HashMap::new(),
            trans: HashMap::new(),
        }
    }

    pub fn grammar(&self) -> &Grammar {
        &self.grammar
    }

    pub fn shared_grammar(&self) -> Arc<Grammar> {
        self.grammar.clone()
    }

    pub fn store(&self) -> &TermStore {
        &self.store
    }

    pub fn store_mut(&mut self) -> &mut TermStore {
        &mut self.store
    }

    pub fn cutoff(&self) -> u32 {
        self.cutoff
    }

    pub fn parse(&mut self, text: &str) -> Result<TermId, TermError> {
        self.store.parse(text)
    }

    pub fn show(&self, t: TermId) -> String {
        self.store.display(t)
    }

    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    /// Transitions of `t` sorted by action, then rule id.
    pub fn transitions(&mut self, t: TermId) -> Transitions {
        if let Some(tr) = self.trans.get(&t) {
            return tr.clone();
        }
        let mut v: Vec<(ActionId, RuleId, TermId)> = lts::transitions(&self.grammar, &mut self.store, t)
            .into_iter()
            .map(|(r, s)| (self.grammar.label(r), r, s))
            .collect();
        v.sort_by_key(|&(a, r, _)| (a, r));
        let tr: Transitions = v.into();
        self.trans.insert(t, tr.clone());
        tr
    }

    /// Successors of `t` under action `a`, in rule-id order.
    pub fn successors(&mut self, t: TermId, a: ActionId) -> Vec<(RuleId, TermId)> {
        self.transitions(t)
            .iter()
            .filter(|x| x.0 == a)
            .map(|x| (x.1, x.2))
            .collect()
    }

    /// `min(eqlevel(t,u), bound)`, computed exactly.
    pub fn level_up_to(&mut self, t: TermId, u: TermId, bound: u32) -> u32 {
        if bound == 0 {
            return 0;
        }
        if t == u {
            return bound;
        }
        let key = if t <= u { (t, u) } else { (u, t) };
        match self.memo.get(&key) {
            Some(Known::Exact(e)) => return (*e).min(bound),
            Some(Known::AtLeast(a)) if *a >= bound => return bound,
            _ => {}
        }
        if self.store.is_var(t).is_some() || self.store.is_var(u).is_some() {
            self.memo.insert(key, Known::Exact(0));
            return 0;
        }
        let tt = self.transitions(t);
        let ut = self.transitions(u);
        if !same_actions(&tt, &ut) {
            self.memo.insert(key, Known::Exact(0));
            return 0;
        }
        // best = min over attacker moves of max over responses, capped at bound - 1.
        let mut best = bound - 1;
        if best > 0 {
            'moves: for a in action_list(&tt) {
                let ts = by_action(&tt, a);
                let us = by_action(&ut, a);
                for (movers, responders, left) in [(ts, us, true), (us, ts, false)] {
                    for m in movers {
                        let mut val = 0;
                        for r in responders {
                            let (p, q) = if left { (m.2, r.2) } else { (r.2, m.2) };
                            let v = self.level_up_to(p, q, best);
                            if v > val {
                                val = v;
                                if val >= best {
                                    break;
                                }
                            }
                        }
                        if val < best {
                            best = val;
                            if best == 0 {
                                break 'moves;
                            }
                        }
                    }
                }
            }
        }
        let res = best + 1;
        let known = if res < bound {
            Known::Exact(res)
        } else {
            Known::AtLeast(bound)
        };
        self.memo.insert(key, known);
        res
    }

    pub fn eq_level(&mut self, t: TermId, u: TermId) -> EqLevel {
        let k = self.cutoff;
        let v = self.level_up_to(t, u, k);
        if v < k {
            EqLevel::Finite(v)
        } else {
            EqLevel::AtLeast(k)
        }
    }

    /// `T ~_k U` for `k` up to the cutoff.
    pub fn check_k_bisim(&mut self, t: TermId, u: TermId, k: u32) -> Result<bool, EquivError> {
        if k > self.cutoff {
            return Err(EquivError::AboveCutoff { k, cutoff: self.cutoff });
        }
        Ok(self.level_up_to(t, u, k) == k)
    }

    fn finite_level(&mut self, t: TermId, u: TermId) -> Result<u32, EquivError> {
        match self.eq_level(t, u) {
            EqLevel::Finite(e) => Ok(e),
            EqLevel::AtLeast(k) => Err(EquivError::NotDistinguished(k)),
        }
    }

    /// A move after which every matching response has eq-level `e - 1`
    /// where `e = eqlevel(t,u)`; actions in declaration order, left before right,
    /// rules in id order.
    pub fn attacker_optimal(&mut self, t: TermId, u: TermId) -> Result<AttackerMove, EquivError> {
        let e = self.finite_level(t, u)?;
        if e == 0 {
            return Err(EquivError::LevelZero);
        }
        let tt = self.transitions(t);
        let ut = self.transitions(u);
        for a in action_list(&tt) {
            for side in [Side::Left, Side::Right] {
                let (movers, responders) = match side {
                    Side::Left => (by_action(&tt, a), by_action(&ut, a)),
                    Side::Right => (by_action(&ut, a), by_action(&tt, a)),
                };
                'mv: for m in movers {
                    for r in responders {
                        let (p, q) = match side {
                            Side::Left => (m.2, r.2),
                            Side::Right => (r.2, m.2),
                        };
                        if self.level_up_to(p, q, e) >= e {
                            continue 'mv;
                        }
                    }
                    return Ok(AttackerMove {
                        side,
                        rule: m.1,
                        successor: m.2,
                    });
                }
            }
        }
        Err(EquivError::Precondition(
            "no optimal attacker move found for a distinguished pair".into(),
        ))
    }

    /// The response maximizing the eq-level of the resulting pair; ties go to
    /// the smallest rule id.
    pub fn defender_optimal(
        &mut self,
        t: TermId,
        u: TermId,
        mv: &AttackerMove,
    ) -> Result<(RuleId, TermId), EquivError> {
        let a = self.grammar.label(mv.rule);
        let from = match mv.side {
            Side::Left => u,
            Side::Right => t,
        };
        let mut best: Option<(u32, RuleId, TermId)> = None;
        for (r, s) in self.successors(from, a) {
            let (p, q) = match mv.side {
                Side::Left => (mv.successor, s),
                Side::Right => (s, mv.successor),
            };
            let v = self.level_up_to(p, q, self.cutoff);
            if best.is_none_or(|b| v > b.0) {
                best = Some((v, r, s));
            }
        }
        best.map(|b| (b.1, b.2)).ok_or(EquivError::NoResponse)
    }

    /// `min_x eqlevel(xσ′, xσ″)` over the joint support.
    pub fn eq_level_subst(&mut self, first: &Substitution, second: &Substitution) -> EqLevel {
        let vars: BTreeSet<u32> = first.support().chain(second.support()).collect();
        let mut lowest = self.cutoff;
        for i in vars {
            let p = self.store.image(i, first);
            let q = self.store.image(i, second);
            lowest = lowest.min(self.level_up_to(p, q, lowest));
            if lowest == 0 {
                break;
            }
        }
        if lowest < self.cutoff {
            EqLevel::Finite(lowest)
        } else {
            EqLevel::AtLeast(self.cutoff)
        }
    }

    /// Decides `t ~ u` exactly when at most `cap` terms are reachable from the
    /// pair; `None` when the state space is larger. Variables are dead but
    /// pairwise distinguished, as in the eq-level game.
    pub fn certify_bisimilar(&mut self, t: TermId, u: TermId, cap: usize) -> Option<bool> {
        if t == u {
            return Some(true);
        }
        let mut index: HashMap<TermId, usize> = HashMap::new();
        let mut order: Vec<TermId> = Vec::new();
        let mut queue = VecDeque::new();
        for s in [t, u] {
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(s) {
                e.insert(order.len());
                order.push(s);
                queue.push_back(s);
            }
        }
        let mut edges: Vec<Vec<(ActionId, usize)>> = Vec::new();
        while let Some(s) = queue.pop_front() {
            let tr = self.transitions(s);
            let mut out = Vec::with_capacity(tr.len());
            for &(a, _, n) in tr.iter() {
                let k = match index.get(&n) {
                    Some(&k) => k,
                    None => {
                        if order.len() >= cap {
                            return None;
                        }
                        let k = order.len();
                        index.insert(n, k);
                        order.push(n);
                        queue.push_back(n);
                        k
                    }
                };
                out.push((a, k));
            }
            edges.push(out);
        }
        // Partition refinement; the initial partition separates each variable.
        let mut class: Vec<usize> = order
            .iter()
            .map(|&s| self.store.is_var(s).map_or(0, |i| i as usize))
            .collect();
        let mut count = class.iter().collect::<BTreeSet<_>>().len();
        loop {
            let mut sigs: HashMap<(usize, BTreeSet<(ActionId, usize)>), usize> = HashMap::new();
            let next: Vec<usize> = (0..order.len())
                .map(|k| {
                    let sig: BTreeSet<(ActionId, usize)> =
                        edges[k].iter().map(|&(a, n)| (a, class[n])).collect();
                    let len = sigs.len();
                    *sigs.entry((class[k], sig)).or_insert(len)
                })
                .collect();
            let new_count = sigs.len();
            class = next;
            if new_count == count {
                break;
            }
            count = new_count;
        }
        Some(class[index[&t]] == class[index[&u]])
    }

    /// Eq-levels of many pairs, optionally on `jobs` threads. Each worker runs
    /// on a clone of the oracle; memo entries about pre-existing terms are
    /// merged back afterwards.
    pub fn eq_levels(&mut self, pairs: &[(TermId, TermId)], jobs: usize) -> Vec<EqLevel> {
        if jobs <= 1 || pairs.len() < 2 * jobs {
            return pairs.iter().map(|&(t, u)| self.eq_level(t, u)).collect();
        }
        let base = self.store.len();
        let chunk = pairs.len().div_ceil(jobs);
        let results: Vec<(Vec<EqLevel>, Memo)> =
            std::thread::scope(|scope| {
                let handles: Vec<_> = pairs
                    .chunks(chunk)
                    .map(|part| {
                        let mut worker = self.clone();
                        scope.spawn(move || {
                            let out: Vec<EqLevel> =
                                part.iter().map(|&(t, u)| worker.eq_level(t, u)).collect();
                            (out, worker.memo)
                        })
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("worker panicked"))
                    .collect()
            });
        let mut all = Vec::with_capacity(pairs.len());
        for (out, memo) in results {
            all.extend(out);
            for (k, v) in memo {
                if k.0.index() < base && k.1.index() < base {
                    self.merge_known(k, v);
                }
            }
        }
        all
    }

    fn merge_known(&mut self, key: (TermId, TermId), v: Known) {
        let keep = match (self.memo.get(&key), v) {
            (Some(Known::Exact(_)), _) => false,
            (Some(Known::AtLeast(a)), Known::AtLeast(b)) => b > *a,
            _ => true,
        };
        if keep {
            self.memo.insert(key, v);
        }
    }
}

fn same_actions(a: &[(ActionId, RuleId, TermId)], b: &[(ActionId, RuleId, TermId)]) -> bool {
    action_list(a) == action_list(b)
}

fn action_list(tr: &[(ActionId, RuleId, TermId)]) -> Vec<ActionId> {
    let mut v: Vec<ActionId> = tr.iter().map(|x| x.0).collect();
    v.dedup();
    v
}

fn by_action(tr: &[(ActionId, RuleId, TermId)], a: ActionId) -> &[(ActionId, RuleId, TermId)] {
    let lo = tr.partition_point(|x| x.0 < a);
    let hi = tr.partition_point(|x| x.0 <= a);
    &tr[lo..hi]
}

//! Shortest sink words `w[A,i]`: the shortest rule words with
//! `A(x1,...,xm) -w-> x_i`, ties broken towards the lexicographically least
//! word in rule-id order.

use crate::terms::NontermId;

use super::{Grammar, Rhs, RuleId, RuleWord};

const INF: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SinkTable {
    // words[A][i-1]
    words: Vec<Vec<Option<RuleWord>>>,
}

impl SinkTable {
    pub fn compute(g: &Grammar) -> Self {
        let sig = g.signature();
        let mut len: Vec<Vec<usize>> = sig.ids().map(|f| vec![INF; sig.arity(f)]).collect();
        // Bellman-Ford style relaxation; lengths only decrease and stay positive.
        loop {
            let mut changed = false;
            for f in sig.ids() {
                for i in 1..=sig.arity(f) {
                    let best = g
                        .rules_for(f)
                        .iter()
                        .map(|&r| dist(&g.rule(r).rhs, i as u32, &len).saturating_add(1))
                        .min()
                        .unwrap_or(INF);
                    if best < len[f.index()][i - 1] {
                        len[f.index()][i - 1] = best;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut pending: Vec<(usize, NontermId, usize)> = sig
            .ids()
            .flat_map(|f| (1..=sig.arity(f)).map(move |i| (f, i)))
            .filter(|&(f, i)| len[f.index()][i - 1] != INF)
            .map(|(f, i)| (len[f.index()][i - 1], f, i))
            .collect();
        pending.sort();
        let mut words: Vec<Vec<Option<RuleWord>>> =
            sig.ids().map(|f| vec![None; sig.arity(f)]).collect();
        for (l, f, i) in pending {
            let mut best: Option<RuleWord> = None;
            for &r in g.rules_for(f) {
                let rhs = &g.rule(r).rhs;
                if dist(rhs, i as u32, &len).saturating_add(1) != l {
                    continue;
                }
                let mut w = vec![r];
                w.extend(path(rhs, i as u32, &len, &words));
                if best.as_ref().is_none_or(|b| w < *b) {
                    best = Some(w);
                }
            }
            words[f.index()][i - 1] = best;
        }
        SinkTable { words }
    }

    /// `w[A,i]` for `i` in `1..=arity(A)`, if the pair is in `NA`.
    pub fn get(&self, f: NontermId, i: usize) -> Option<&[RuleId]> {
        self.words
            .get(f.index())?
            .get(i.checked_sub(1)?)?
            .as_deref()
    }

    /// All pairs `(A,i)` that have a sink word.
    pub fn entries(&self) -> impl Iterator<Item = (NontermId, usize, &[RuleId])> {
        self.words.iter().enumerate().flat_map(|(f, ws)| {
            ws.iter().enumerate().filter_map(move |(i, w)| {
                w.as_deref().map(|w| (NontermId(f as u32), i + 1, w))
            })
        })
    }

    pub fn max_len(&self) -> usize {
        self.entries().map(|(_, _, w)| w.len()).max().unwrap_or(0)
    }
}

/// Shortest number of steps taking `rhs` (as a path in the rule LTS) to `x_i`.
fn dist(rhs: &Rhs, i: u32, len: &[Vec<usize>]) -> usize {
    match rhs {
        Rhs::Var(j) => {
            if *j == i {
                0
            } else {
                INF
            }
        }
        Rhs::App(f, args) => args
            .iter()
            .enumerate()
            .map(|(k, a)| len[f.index()][k].saturating_add(dist(a, i, len)))
            .min()
            .unwrap_or(INF),
    }
}

fn path(rhs: &Rhs, i: u32, len: &[Vec<usize>], words: &[Vec<Option<RuleWord>>]) -> RuleWord {
    match rhs {
        Rhs::Var(_) => Vec::new(),
        Rhs::App(f, args) => {
            let d = dist(rhs, i, len);
            let mut best: Option<RuleWord> = None;
            for (k, a) in args.iter().enumerate() {
                if len[f.index()][k].saturating_add(dist(a, i, len)) != d {
                    continue;
                }
                let mut w = words[f.index()][k].clone().expect("shorter words are known");
                w.extend(path(a, i, len, words));
                if best.as_ref().is_none_or(|b| w < *b) {
                    best = Some(w);
                }
            }
            best.expect("finite distance has a witness")
        }
    }
}

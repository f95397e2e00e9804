use crate::equiv::{EqOracle, Side};
use crate::lts::{replay, run_word, PathRecord, Replay};
use crate::terms::TermId;

use super::{balance_step, build_optimal_play, enables_balancing, BalanceStep, ModifiedPlay, Play};
use super::{PlayContext, PlayError};

/// One transformation phase: the balanced play `ρ_j`, its balancing step and
/// the continuation `μ_j` from the bal-result up to the next `ρ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Phase {
    pub rho: Play,
    pub step: BalanceStep,
    pub mu: Play,
    /// Position in `μ_j` where the balanced side first exposes some `x_iσ''`,
    /// with that `i`; splits `μ_j` into its unclear and sinking parts.
    pub sink: Option<(usize, u32)>,
}

impl Phase {
    pub fn side(&self) -> Side {
        self.step.side
    }

    /// Length of `μ^unc_j`.
    pub fn unclear_len(&self) -> usize {
        self.sink.map_or(self.mu.len(), |(q, _)| q)
    }

    /// `μ^dsink_j`, if defined.
    pub fn sinking(&self) -> Option<Play> {
        self.sink.map(|(q, _)| self.mu.slice(q, self.mu.len()))
    }
}

/// `π_ℓ = μ0 ρ'_1 μ_1 ... ρ'_ℓ μ_ℓ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedPlay {
    pub start: (TermId, TermId),
    pub level: u32,
    pub d0: usize,
    pub mu0: Play,
    pub phases: Vec<Phase>,
}

impl BalancedPlay {
    pub fn len(&self) -> usize {
        self.mu0.len() + self.phases.iter().map(|p| p.rho.len() + p.mu.len()).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn pivots(&self) -> Vec<TermId> {
        self.phases.iter().map(|p| p.step.pivot).collect()
    }

    pub fn bal_results(&self) -> Vec<(TermId, TermId)> {
        self.phases.iter().map(|p| p.step.result).collect()
    }

    /// The same structure as a modified play glued by eqlevel-concatenation.
    pub fn to_modified(&self) -> ModifiedPlay {
        let mut cur = match self.phases.first() {
            Some(p) => self.mu0.concat(&p.rho),
            None => self.mu0.clone(),
        };
        let mut out: Option<ModifiedPlay> = None;
        for (j, p) in self.phases.iter().enumerate() {
            let mut next = p.mu.clone();
            if let Some(n) = self.phases.get(j + 1) {
                next = next.concat(&n.rho);
            }
            let done = match out {
                None => ModifiedPlay::single(cur),
                Some(m) => m
                    .econc(&ModifiedPlay::single(cur))
                    .expect("phases meet at equal levels"),
            };
            out = Some(done);
            cur = next;
        }
        match out {
            None => ModifiedPlay::single(cur),
            Some(m) => m.econc(&ModifiedPlay::single(cur)).expect("phases meet at equal levels"),
        }
    }
}

/// `W_j -w_j-> W_{j+1}`, split into an unclear prefix and a sinking suffix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotSegment {
    /// Side of the play on which `W_{j+1}` lies.
    pub side: Side,
    pub path: PathRecord,
    pub unclear_len: usize,
}

impl PivotSegment {
    pub fn from(&self) -> TermId {
        self.path.start()
    }

    pub fn to(&self) -> TermId {
        self.path.end()
    }

    pub fn unclear(&self) -> &[crate::grammar::RuleId] {
        &self.path.word[..self.unclear_len]
    }

    pub fn sinking_path(&self) -> PathRecord {
        self.path.slice(self.unclear_len, self.path.len())
    }
}

/// `W_0 -w_0-> W_1 ... W_ℓ -w_ℓ-> W_{ℓ+1}`; empty when `ℓ = 0`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct PivotPath {
    pub segments: Vec<PivotSegment>,
}

impl PivotPath {
    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    pub fn word(&self) -> Vec<crate::grammar::RuleId> {
        self.segments.iter().flat_map(|s| s.path.word.iter().copied()).collect()
    }
}

/// Transforms a completed optimal play from `(t,u)` into a balanced modified
/// play, balancing as early as possible; a switch of sides waits until the
/// balanced side exposes one of the substituted terms.
pub fn transform_to_balanced(
    o: &mut EqOracle,
    ctx: &PlayContext,
    t: TermId,
    u: TermId,
) -> Result<(BalancedPlay, PivotPath), PlayError> {
    let d0 = ctx.d0();
    let pi = build_optimal_play(o, t, u)?;
    let level = pi.start_level();
    let first = earliest(o, &pi, d0, |o, _, r| {
        if enables_balancing(o, r, Side::Left, d0).is_some() {
            Some(Side::Left)
        } else if enables_balancing(o, r, Side::Right, d0).is_some() {
            Some(Side::Right)
        } else {
            None
        }
    });
    let Some((p, mut side)) = first else {
        let b = BalancedPlay {
            start: (t, u),
            level,
            d0,
            mu0: pi,
            phases: Vec::new(),
        };
        return Ok((b, PivotPath::default()));
    };
    let mu0 = pi.slice(0, p);
    let mut rho = pi.slice(p, p + d0);
    let mut step = balance_step(o, ctx, &rho, side)?;
    let mut phases = Vec::new();
    loop {
        let cont = build_optimal_play(o, step.result.0, step.result.1)?;
        let g = o.shared_grammar();
        let sink = match replay(&g, o.store_mut(), step.split.top, cont.word(side)) {
            Replay::Var { steps, var } => Some((steps, var)),
            _ => None,
        };
        // Same-side balancing at position p wins over a switch at the same p.
        let chosen = earliest(o, &cont, d0, |o, p, r| {
            if enables_balancing(o, r, side, d0).is_some() {
                Some(side)
            } else if sink.is_some_and(|(q, _)| q <= p)
                && enables_balancing(o, r, side.other(), d0).is_some()
            {
                Some(side.other())
            } else {
                None
            }
        });
        match chosen {
            None => {
                phases.push(Phase {
                    rho,
                    step,
                    mu: cont,
                    sink,
                });
                break;
            }
            Some((p, ns)) => {
                let mu = cont.slice(0, p);
                let sink = sink.filter(|&(q, _)| q <= p);
                phases.push(Phase {
                    rho,
                    step,
                    mu,
                    sink,
                });
                rho = cont.slice(p, p + d0);
                step = balance_step(o, ctx, &rho, ns)?;
                side = ns;
            }
        }
    }
    let b = BalancedPlay {
        start: (t, u),
        level,
        d0,
        mu0,
        phases,
    };
    let path = pivot_path(o, &b);
    Ok((b, path))
}

/// Smallest `p` such that `test` accepts the window `play[p..p+d0]` at `p`.
fn earliest(
    o: &mut EqOracle,
    play: &Play,
    d0: usize,
    mut test: impl FnMut(&mut EqOracle, usize, &Play) -> Option<Side>,
) -> Option<(usize, Side)> {
    if play.len() < d0 {
        return None;
    }
    (0..=play.len() - d0).find_map(|p| test(o, p, &play.slice(p, p + d0)).map(|s| (p, s)))
}

fn pivot_path(o: &mut EqOracle, b: &BalancedPlay) -> PivotPath {
    let g = o.shared_grammar();
    let mut segments = Vec::with_capacity(b.phases.len() + 1);
    let first_pivot_side = b.phases[0].side().other();
    segments.push(PivotSegment {
        side: first_pivot_side,
        path: b.mu0.path(first_pivot_side),
        unclear_len: 0,
    });
    for (j, ph) in b.phases.iter().enumerate() {
        let bal = ph.side();
        let pivot_side = bal.other();
        let switch = b.phases.get(j + 1).is_some_and(|n| n.side() == pivot_side);
        let seg = if switch {
            let (q, var) = ph.sink.expect("a side switch needs an exposed substituted term");
            let reach = ph.step.reach(var);
            let head = run_word(&g, o.store_mut(), ph.step.pivot, &reach.word)
                .expect("reach words are performable from the pivot");
            let tail = ph.mu.path(bal).slice(q, ph.mu.len());
            PivotSegment {
                side: bal,
                path: join(head, tail),
                unclear_len: reach.word.len(),
            }
        } else {
            let q = ph.unclear_len();
            PivotSegment {
                side: pivot_side,
                path: join(ph.rho.path(pivot_side), ph.mu.path(pivot_side)),
                unclear_len: ph.rho.len() + q,
            }
        };
        segments.push(seg);
    }
    PivotPath { segments }
}

fn join(mut a: PathRecord, b: PathRecord) -> PathRecord {
    debug_assert_eq!(a.end(), b.start());
    a.word.extend_from_slice(&b.word);
    a.states.extend_from_slice(&b.states[1..]);
    a
}

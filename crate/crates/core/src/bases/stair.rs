use crate::equiv::EqOracle;
use crate::lts::{is_stair, run_word};
use crate::plays::{bal_result_tops, top_form, BalancedPlay, PivotPath, PlayContext, Segmentation};
use crate::terms::TermId;

use super::{BasesError, NsgParams, NsgSequence};

/// The bal-results of one crucial segment as an `(n,s,g)`-sequence over the
/// `d0`-top of the stair's first term.
#[derive(Clone, Debug)]
pub struct StairSequence {
    pub seq: NsgSequence,
    pub params: NsgParams,
    /// The `d0`-top `A(x1..xm)σ̄̄` of the stair's first term `V`.
    pub base_top: TermId,
    /// `G_i` with `W_{k+i-1} = G_i σ`.
    pub pivot_tops: Vec<TermId>,
    /// 1-based pivot indices covered.
    pub pivots: Vec<usize>,
}

/// Presents the bal-results of crucial segment `idx` as an `(n,s,g)`-sequence
/// with the grammar's own parameters; each claimed identity is rechecked.
pub fn present_stair_as_nsg(
    o: &mut EqOracle,
    ctx: &PlayContext,
    b: &BalancedPlay,
    path: &PivotPath,
    seg: &Segmentation,
    idx: usize,
) -> Result<StairSequence, BasesError> {
    let params = NsgParams::from_constants(&ctx.consts)?;
    let crucial = seg
        .crucial
        .get(idx)
        .ok_or_else(|| BasesError::Precondition(format!("no crucial segment {idx}")))?;
    let g = o.shared_grammar();
    let stair = &crucial.stair;
    let v = stair.start();
    if o.store().root(v).is_none() || !is_stair(&g, o.store_mut(), &stair.word) {
        return Err(BasesError::NotAStair(idx));
    }
    let d0 = ctx.d0();
    let tf = top_form(o.store_mut(), v, d0 as u32);
    let k = crucial.first;
    let head = path.segments[k - 1].path.len()
        - seg.last_visit[k - 1].expect("crucial segments start at a close pivot");
    let mut pos = head;
    let mut tops = Vec::new();
    let mut pivot_tops = Vec::new();
    let mut pivots = Vec::new();
    for j in k..crucial.end {
        if j > k {
            pos += path.segments[j - 1].path.len();
        }
        let gi = run_word(&g, o.store_mut(), tf.top, &stair.word[..pos])
            .ok_or(BasesError::NotAStair(idx))?
            .end();
        let w = o.store_mut().apply(gi, &tf.tail);
        if w != b.phases[j - 1].step.pivot {
            return Err(BasesError::Postcondition(format!(
                "G_{}σ is {} but pivot W_{j} is {}",
                j - k + 1,
                o.show(w),
                o.show(b.phases[j - 1].step.pivot)
            )));
        }
        let phase = &b.phases[j - 1];
        let (e, f) = bal_result_tops(o, gi, &phase.step, &phase.rho).ok_or_else(|| {
            BasesError::Postcondition(format!("a balancing word is not performable from G_{}", j - k + 1))
        })?;
        let es = o.store_mut().apply(e, &tf.tail);
        let fs = o.store_mut().apply(f, &tf.tail);
        if (es, fs) != phase.step.result {
            return Err(BasesError::Postcondition(format!(
                "(E_{0}σ, F_{0}σ) differs from the bal-result of pivot {j}",
                j - k + 1
            )));
        }
        tops.push((e, f));
        pivot_tops.push(gi);
        pivots.push(j);
    }
    Ok(StairSequence {
        seq: NsgSequence { tops, tail: tf.tail },
        params,
        base_top: tf.top,
        pivot_tops,
        pivots,
    })
}

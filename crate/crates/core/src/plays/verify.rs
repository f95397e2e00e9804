use std::collections::{HashMap, HashSet};

use num_bigint::BigUint;
use serde::Serialize;

use crate::equiv::{EqLevel, EqOracle, Side};
use crate::lts::{is_d0_sinking, is_stair, run_word, step_rule};

use super::{bal_result_tops, top_form, BalancedPlay, PivotPath, Play, PlayContext, Segmentation};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    fn push(&mut self, name: &'static str, problems: Vec<String>, ok_detail: String) {
        let passed = problems.is_empty();
        let detail = if passed { ok_detail } else { problems.join("; ") };
        self.checks.push(Check { name, passed, detail });
    }
}

fn big(x: usize) -> BigUint {
    BigUint::from(x)
}

/// Re-derives every structural claim about a balanced play and its pivot path
/// and checks the grammar-constant bounds on unclear parts, close sink-parts
/// and crucial segments.
pub fn verify_balanced(
    o: &mut EqOracle,
    ctx: &PlayContext,
    b: &BalancedPlay,
    path: &PivotPath,
    seg: &Segmentation,
) -> Report {
    let mut report = Report::default();
    let c = &ctx.consts;
    let d0 = ctx.d0();
    let ell = b.phases.len();
    let ps = o.store().pressize(&[b.start.0, b.start.1]);

    // Every piece is an optimal play whose levels the oracle confirms.
    let mut problems = Vec::new();
    let mut pieces: Vec<(String, &Play)> = vec![("mu0".into(), &b.mu0)];
    for (j, ph) in b.phases.iter().enumerate() {
        pieces.push((format!("rho{}", j + 1), &ph.rho));
        pieces.push((format!("mu{}", j + 1), &ph.mu));
    }
    for (name, p) in &pieces {
        if let Some(e) = play_problem(o, p) {
            problems.push(format!("{name}: {e}"));
        }
    }
    report.push("play-steps", problems, format!("{} plays", pieces.len()));

    let modified = b.to_modified();
    let mut problems = Vec::new();
    if b.len() != b.level as usize || modified.len() != b.level as usize {
        problems.push(format!("length {} but eq-level {}", b.len(), b.level));
    }
    if !modified.is_completed() {
        problems.push("the modified play does not end at level 0".into());
    }
    report.push("total-length", problems, format!("length {} = eq-level", b.len()));

    let pairs = modified.pairs();
    let distinct: HashSet<_> = pairs.iter().collect();
    let problems = if distinct.len() == pairs.len() {
        Vec::new()
    } else {
        vec![format!("{} pairs, {} distinct", pairs.len(), distinct.len())]
    };
    report.push("distinct-pairs", problems, format!("{} pairs", pairs.len()));

    let g = o.shared_grammar();
    let mut problems = Vec::new();
    for (j, ph) in b.phases.iter().enumerate() {
        let st = &ph.step;
        let after = o.eq_level(st.result.0, st.result.1);
        if after != EqLevel::Finite(st.level) || ph.rho.finish_level() != st.level {
            problems.push(format!("step {}: bal-result level {after}, expected {}", j + 1, st.level));
        }
        if ph.mu.start() != st.result {
            problems.push(format!("step {}: continuation does not start at the bal-result", j + 1));
        }
        for r in &st.reaches {
            let Some(w) = ctx.sinks.get(st.split.nonterminal, r.var as usize) else {
                if !r.word.is_empty() || r.target != st.pivot {
                    problems.push(format!("step {}: x{} is not exposable", j + 1, r.var));
                }
                continue;
            };
            if g.labels(w) != g.labels(&r.word) {
                problems.push(format!("step {}: reach word for x{} has wrong labels", j + 1, r.var));
            }
            let end = run_word(&g, o.store_mut(), st.pivot, &r.word).map(|p| p.end());
            if end != Some(r.target) {
                problems.push(format!("step {}: reach word for x{} misses", j + 1, r.var));
            }
            let child = st.split.args[r.var as usize - 1];
            if o.level_up_to(child, r.target, st.level + 1) <= st.level {
                problems.push(format!("step {}: replacement for x{} too weak", j + 1, r.var));
            }
        }
    }
    report.push("balancing-sound", problems, format!("{ell} balancing steps"));

    let mut problems = Vec::new();
    let slack = big(c.m as usize + 2) * big(d0) * big(c.stepinc as usize);
    for (j, ph) in b.phases.iter().enumerate() {
        let st = &ph.step;
        let tf = top_form(o.store_mut(), st.pivot, d0 as u32);
        let Some((e, f)) = bal_result_tops(o, tf.top, st, &ph.rho) else {
            problems.push(format!("step {}: top form is not safe", j + 1));
            continue;
        };
        let es = o.store_mut().apply(e, &tf.tail);
        let fs = o.store_mut().apply(f, &tf.tail);
        if (es, fs) != st.result {
            problems.push(format!("step {}: tops do not reproduce the bal-result", j + 1));
        }
        let top_vars = o.store().varin(&[tf.top]);
        if !o.store().varin(&[e, f]).is_subset(&top_vars) {
            problems.push(format!("step {}: tops use variables outside the pivot top", j + 1));
        }
        let lhs = big(o.store().pressize(&[e, f]));
        let rhs = big(o.store().pressize(&[tf.top])) + &slack;
        if lhs > rhs {
            problems.push(format!("step {}: top size {lhs} exceeds {rhs}", j + 1));
        }
    }
    report.push("top-form", problems, format!("{ell} bal-results presented over d0-tops"));

    let mut per_pivot: HashMap<_, HashSet<_>> = HashMap::new();
    for ph in &b.phases {
        per_pivot.entry(ph.step.pivot).or_default().insert(ph.step.result);
    }
    let occurrences: HashMap<_, usize> = b.phases.iter().fold(HashMap::new(), |mut m, ph| {
        *m.entry(ph.step.pivot).or_insert(0) += 1;
        m
    });
    let worst = occurrences.values().copied().max().unwrap_or(0);
    let distinct_worst = per_pivot.values().map(HashSet::len).max().unwrap_or(0);
    let problems = if big(worst) <= c.d1 && distinct_worst == worst {
        Vec::new()
    } else {
        vec![format!("a pivot occurs {worst} times ({distinct_worst} bal-results), d1 = {}", c.d1)]
    };
    report.push("pivot-multiplicity", problems, format!("at most {worst} per pivot"));

    let mut problems = Vec::new();
    for side in [Side::Left, Side::Right] {
        if !is_d0_sinking(&g, o.store_mut(), &b.mu0.path(side), d0) {
            problems.push(format!("mu0 {side:?} path"));
        }
        for (j, ph) in b.phases.iter().enumerate() {
            if let Some(d) = ph.sinking() {
                if !is_d0_sinking(&g, o.store_mut(), &d.path(side), d0) {
                    problems.push(format!("mu{} sinking part, {side:?} path", j + 1));
                }
            }
        }
    }
    report.push("sinking-parts", problems, "all sinking parts are d0-sinking".into());

    report.push("pivot-path", pivot_path_problems(o, ctx, b, path), format!("{} segments", path.segments.len()));

    let mut problems = Vec::new();
    let mut longest = 0;
    for (j, ph) in b.phases.iter().enumerate() {
        let part = ph.rho.len() + ph.unclear_len();
        let unc = path.segments[j + 1].unclear_len;
        longest = longest.max(part);
        if unc > part || big(part) > c.d2 {
            problems.push(format!("phase {}: |w_unc| = {unc}, unclear part {part}, d2 = {}", j + 1, c.d2));
        }
    }
    report.push("unclear-length", problems, format!("longest {longest} <= d2 = {}", c.d2));

    let total = seg.csink_total();
    let bound = &c.d3 * big(ps) * big(ps);
    let problems = if big(total) <= bound {
        Vec::new()
    } else {
        vec![format!("close sink-parts total {total} > {bound}")]
    };
    report.push("close-sink-total", problems, format!("{total} <= d3*{ps}^2"));

    let count = seg.crucial.len();
    let bound = &c.d4 * big(ps);
    let problems = if big(count) <= bound {
        Vec::new()
    } else {
        vec![format!("{count} crucial segments > {bound}")]
    };
    report.push("crucial-count", problems, format!("{count} crucial segments"));

    let mut problems = Vec::new();
    for (i, cs) in seg.crucial.iter().enumerate() {
        let bound = &c.d5 * big(1 + cs.index_len());
        if big(cs.length) > bound {
            problems.push(format!("segment {}: length {} > {bound}", i + 1, cs.length));
        }
    }
    report.push("crucial-length", problems, format!("{count} segments within d5*(1+index length)"));

    let mut problems = Vec::new();
    let covered = total + seg.crucial.iter().map(|s| s.length).sum::<usize>();
    if covered != b.len() {
        problems.push(format!("segments cover {covered} of {} steps", b.len()));
    }
    if ell >= 1 && seg.close.first() != Some(&1) {
        problems.push("the first pivot is not close".into());
    }
    for (i, cs) in seg.crucial.iter().enumerate() {
        if !is_stair(&g, o.store_mut(), &cs.stair.word) {
            problems.push(format!("segment {} does not follow a stair", i + 1));
        }
    }
    report.push("segment-cover", problems, format!("{covered} steps covered"));

    report
}

fn play_problem(o: &mut EqOracle, p: &Play) -> Option<String> {
    let g = o.shared_grammar();
    if p.left.len() != p.right.len() || p.pairs.len() != p.left.len() + 1 || p.levels.len() != p.pairs.len() {
        return Some("malformed".into());
    }
    for k in 0..p.pairs.len() {
        let (t, u) = p.pairs[k];
        if o.eq_level(t, u) != EqLevel::Finite(p.levels[k]) {
            return Some(format!("pair {k} has level {}", o.eq_level(t, u)));
        }
        if k == 0 {
            continue;
        }
        let (pt, pu) = p.pairs[k - 1];
        let (rl, rr) = (p.left[k - 1], p.right[k - 1]);
        if g.label(rl) != g.label(rr) {
            return Some(format!("step {k} has different labels"));
        }
        if step_rule(&g, o.store_mut(), pt, rl) != Some(t) || step_rule(&g, o.store_mut(), pu, rr) != Some(u) {
            return Some(format!("step {k} is not a transition"));
        }
        if p.levels[k] + 1 != p.levels[k - 1] {
            return Some(format!("step {k} does not drop the level by one"));
        }
    }
    None
}

fn pivot_path_problems(o: &mut EqOracle, ctx: &PlayContext, b: &BalancedPlay, path: &PivotPath) -> Vec<String> {
    let mut problems = Vec::new();
    let ell = b.phases.len();
    if ell == 0 {
        if !path.is_empty() {
            problems.push("a pivot path without pivots".into());
        }
        return problems;
    }
    if path.segments.len() != ell + 1 {
        problems.push(format!("{} segments for {ell} pivots", path.segments.len()));
        return problems;
    }
    let g = o.shared_grammar();
    let w0 = path.segments[0].from();
    if w0 != b.start.0 && w0 != b.start.1 {
        problems.push("W0 is not a start term".into());
    }
    let Some(run) = run_word(&g, o.store_mut(), w0, &path.word()) else {
        problems.push("the pivot path is not performable".into());
        return problems;
    };
    let mut pos = 0;
    for (j, s) in path.segments.iter().enumerate() {
        if run.states[pos..=pos + s.path.len()] != s.path.states[..] {
            problems.push(format!("segment {j} does not replay"));
        }
        pos += s.path.len();
        if j < ell && s.to() != b.phases[j].step.pivot {
            problems.push(format!("segment {j} does not reach pivot {}", j + 1));
        }
        if j >= 1 && s.from() != b.phases[j - 1].step.pivot {
            problems.push(format!("segment {j} does not start at pivot {j}"));
        }
        if !is_d0_sinking(&g, o.store_mut(), &s.sinking_path(), ctx.d0()) {
            problems.push(format!("sinking part of segment {j} is not d0-sinking"));
        }
    }
    let last = path.segments.last().expect("nonempty");
    let fin = b.phases.last().expect("nonempty").mu.finish();
    let expected = match last.side {
        Side::Left => fin.0,
        Side::Right => fin.1,
    };
    if last.to() != expected {
        problems.push("the pivot path does not end in the final pair".into());
    }
    problems
}

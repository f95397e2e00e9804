//! The `fogbisim` command line.
//!
//! Exit codes: 0 pass (or equal so far), 1 distinguished or a failed check,
//! 2 usage or parse error, 3 cutoff reached before an answer.

pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use thiserror::Error;

use crate::bases::{
    build_full_base_capped, nsg_problems, present_stair_as_nsg, reduce_nsg_step, sound_candidate_search,
    BasesError, Caps, NsgParams, SearchStatus,
};
use crate::equiv::{EqLevel, EqOracle, EquivError};
use crate::grammar::{parse_grammar, Grammar, GrammarError};
use crate::lts::{run_word, step_rule, transitions};
use crate::plays::{
    build_optimal_play, refine_segments, transform_to_balanced, verify_balanced, BalancedPlay, PivotPath,
    PlayContext, PlayError, Segmentation,
};
use crate::sample::{random_term, rng};
use crate::terms::{TermError, TermId};

pub use report::{ConstantRow, NontermSummary, RuleSummary, SinkSummary, ValidateReport};

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "fogbisim", version, about = "Bounded bisimulation analysis of first-order grammars")]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Grammar file.
    #[arg(long, global = true)]
    pub grammar: Option<PathBuf>,
    /// Eq-levels are computed exactly below this bound.
    #[arg(long, global = true, default_value_t = 32, value_parser = clap::value_parser!(u32).range(1..))]
    pub cutoff: u32,
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for sampled pairs when no terms are given.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for independent pair queries.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Extra detail on stderr.
    #[arg(long, global = true)]
    pub trace: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and check a grammar, then summarize it.
    Validate { path: Option<PathBuf> },
    /// Print the grammar-derived constants.
    Constants,
    /// List the transitions of a term.
    Step {
        term: String,
        #[arg(long)]
        action: Option<String>,
    },
    /// Perform a rule word from a term.
    Run { term: String, word: String },
    /// Eq-level of a pair, or of each `T ; U` line of a batch file.
    Eqlevel {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        batch: Option<PathBuf>,
    },
    /// Distinguished below the cutoff, or equivalent up to it.
    Decide(PairArgs),
    /// An optimal play from the pair.
    Play(PairArgs),
    /// The balanced modified play and its segments.
    Balance(PairArgs),
    /// Check every bound on the balanced play.
    Verify(PairArgs),
    /// Build the capped full base for `(n,s,g)`.
    Base(BaseArgs),
    /// Balance, verify, present stairs as sequences and reduce them.
    Pipeline(PairArgs),
}

/// Two terms; when both are omitted a pair is sampled from `--seed`.
#[derive(Args, Debug, Clone)]
pub struct PairArgs {
    pub left: Option<String>,
    pub right: Option<String>,
    /// Height of sampled terms.
    #[arg(long, default_value_t = 5)]
    pub height: u32,
}

#[derive(Args, Debug, Clone)]
pub struct BaseArgs {
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    #[arg(long, default_value_t = 2)]
    pub s: u64,
    #[arg(long, default_value_t = 0)]
    pub g: u64,
    #[arg(long, default_value_t = 4)]
    pub max_size: usize,
    /// State budget when deciding pairs at the cutoff.
    #[arg(long, default_value_t = 20_000)]
    pub certify: usize,
    /// Also run the sound-candidate search and compare.
    #[arg(long)]
    pub sound: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Grammar(#[from] GrammarError),
    #[error("{0}")]
    Term(#[from] TermError),
    #[error("{0}")]
    Cutoff(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Cutoff(_) => 3,
            CliError::Failed(_) => 1,
            _ => 2,
        }
    }
}

impl From<PlayError> for CliError {
    fn from(e: PlayError) -> Self {
        match e {
            PlayError::AboveCutoff(_) | PlayError::Starved { .. } | PlayError::Equiv(EquivError::AboveCutoff { .. }) => {
                CliError::Cutoff(e.to_string())
            }
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<BasesError> for CliError {
    fn from(e: BasesError) -> Self {
        match e {
            BasesError::AboveCutoff(_) | BasesError::Indeterminate { .. } => CliError::Cutoff(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

/// What a command produced: an exit code plus text and JSON renderings.
pub struct Outcome {
    pub code: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome { code: 0, text, json }
    }
}

/// Parses `args` (including the program name), runs the command and writes
/// its output; returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    let json = cli.config.json;
    let name = command_name(&cli.command);
    match execute(&cli.config, &cli.command, err) {
        Ok(o) => {
            if json {
                let mut v = o.json;
                if let Value::Object(m) = &mut v {
                    m.insert("schema".into(), json!(SCHEMA));
                    m.insert("command".into(), json!(name));
                }
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("values serialize"));
            } else {
                let _ = write!(out, "{}", o.text);
            }
            o.code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            if json {
                let v = json!({"schema": SCHEMA, "command": name, "error": e.to_string(), "exit": e.code()});
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&v).expect("values serialize"));
            }
            e.code()
        }
    }
}

/// Entry point for the binary.
pub fn main() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate { .. } => "validate",
        Command::Constants => "constants",
        Command::Step { .. } => "step",
        Command::Run { .. } => "run",
        Command::Eqlevel { .. } => "eqlevel",
        Command::Decide(_) => "decide",
        Command::Play(_) => "play",
        Command::Balance(_) => "balance",
        Command::Verify(_) => "verify",
        Command::Base(_) => "base",
        Command::Pipeline(_) => "pipeline",
    }
}

fn read(path: &PathBuf) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })
}

fn load_grammar(cfg: &RunConfig) -> Result<Arc<Grammar>, CliError> {
    let path = cfg
        .grammar
        .as_ref()
        .ok_or_else(|| CliError::Usage("missing --grammar <FILE>".into()))?;
    Ok(Arc::new(parse_grammar(&read(path)?)?))
}

fn execute(cfg: &RunConfig, cmd: &Command, trace: &mut dyn Write) -> Result<Outcome, CliError> {
    if let Command::Validate { path } = cmd {
        let path = path
            .as_ref()
            .or(cfg.grammar.as_ref())
            .ok_or_else(|| CliError::Usage("missing grammar path".into()))?;
        let g = parse_grammar(&read(path)?)?;
        let r = ValidateReport::new(&path.display().to_string(), &g);
        return Ok(Outcome::ok(r.to_text(), serde_json::to_value(&r).expect("report serializes")));
    }
    let g = load_grammar(cfg)?;
    let mut o = EqOracle::new(g.clone(), cfg.cutoff);
    match cmd {
        Command::Validate { .. } => unreachable!("handled above"),
        Command::Constants => Ok(constants(&g)),
        Command::Step { term, action } => step(&mut o, term, action.as_deref()),
        Command::Run { term, word } => run(&mut o, term, word),
        Command::Eqlevel { pair, batch } => eqlevel(cfg, &mut o, pair, batch.as_ref()),
        Command::Decide(p) => decide(cfg, &mut o, p),
        Command::Play(p) => play(cfg, &mut o, p, trace),
        Command::Balance(p) => balance(cfg, &mut o, p, trace),
        Command::Verify(p) => verify(cfg, &mut o, p),
        Command::Base(b) => base(&mut o, b),
        Command::Pipeline(p) => pipeline(cfg, &mut o, p, trace),
    }
}

fn constants(g: &Grammar) -> Outcome {
    let ctx = PlayContext::new(g);
    let mut text = String::new();
    let mut map = serde_json::Map::new();
    for (name, value) in ctx.consts.rows() {
        text.push_str(&format!("{name:8} {value}\n"));
        map.insert(name.into(), json!(value));
    }
    let sinks: Vec<Value> = ctx
        .sinks
        .entries()
        .map(|(f, i, w)| json!({"nonterminal": g.signature().name(f), "var": i, "word": g.format_word(w)}))
        .collect();
    Outcome::ok(text, json!({"constants": map, "sink_words": sinks}))
}

fn step(o: &mut EqOracle, term: &str, action: Option<&str>) -> Result<Outcome, CliError> {
    let g = o.shared_grammar();
    let t = o.parse(term)?;
    let filter = match action {
        Some(a) => Some(
            g.action_lookup(a)
                .ok_or_else(|| CliError::Usage(format!("unknown action `{a}`")))?,
        ),
        None => None,
    };
    let mut text = String::new();
    let mut rows = Vec::new();
    for (r, s) in transitions(&g, o.store_mut(), t) {
        let a = g.label(r);
        if filter.is_some_and(|f| f != a) {
            continue;
        }
        let (rule, act, succ) = (&g.rule(r).name, g.action_name(a), o.show(s));
        text.push_str(&format!("{rule} -{act}-> {succ}\n"));
        rows.push(json!({"rule": rule, "action": act, "successor": succ}));
    }
    Ok(Outcome::ok(text, json!({"term": o.show(t), "transitions": rows})))
}

fn run(o: &mut EqOracle, term: &str, word: &str) -> Result<Outcome, CliError> {
    let g = o.shared_grammar();
    let t = o.parse(term)?;
    let w = g.parse_word(word)?;
    if let Some(p) = run_word(&g, o.store_mut(), t, &w) {
        let states: Vec<String> = p.states.iter().map(|&s| o.show(s)).collect();
        let text = states.join("\n") + "\n";
        return Ok(Outcome::ok(text, json!({"word": g.format_word(&w), "states": states})));
    }
    let mut cur = t;
    for (k, &r) in w.iter().enumerate() {
        match step_rule(&g, o.store_mut(), cur, r) {
            Some(n) => cur = n,
            None => {
                return Err(CliError::Failed(format!(
                    "rule {} is not applicable after {k} steps, at {}",
                    g.rule(r).name,
                    o.show(cur)
                )))
            }
        }
    }
    unreachable!("run_word failed, so some step does")
}

/// The given pair, or one sampled from the seed with a finite eq-level.
fn pair(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs) -> Result<(TermId, TermId), CliError> {
    match (&p.left, &p.right) {
        (Some(l), Some(r)) => Ok((o.parse(l)?, o.parse(r)?)),
        (None, None) => {
            let mut r = rng(cfg.seed);
            for _ in 0..2000 {
                let t = random_term(&mut r, o.store_mut(), p.height, 0);
                let u = random_term(&mut r, o.store_mut(), p.height, 0);
                if matches!(o.eq_level(t, u), EqLevel::Finite(k) if k > 0) {
                    return Ok((t, u));
                }
            }
            Err(CliError::Cutoff(format!(
                "no sampled pair is distinguished below the cutoff {}",
                o.cutoff()
            )))
        }
        _ => Err(CliError::Usage("give both terms or neither".into())),
    }
}

fn level_json(l: EqLevel) -> Value {
    match l {
        EqLevel::Finite(k) => json!({"finite": k}),
        EqLevel::AtLeast(k) => json!({"at_least": k}),
    }
}

fn level_text(l: EqLevel) -> String {
    match l {
        EqLevel::Finite(k) => format!("eqlevel={k}"),
        EqLevel::AtLeast(k) => format!("eqlevel>={k}"),
    }
}

fn eqlevel(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs, batch: Option<&PathBuf>) -> Result<Outcome, CliError> {
    let pairs = match batch {
        Some(path) => {
            let text = read(path)?;
            let mut pairs = Vec::new();
            for (ln, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let (l, r) = line
                    .split_once(';')
                    .ok_or_else(|| CliError::Usage(format!("line {}: expected `T ; U`", ln + 1)))?;
                pairs.push((o.parse(l.trim())?, o.parse(r.trim())?));
            }
            pairs
        }
        None => vec![pair(cfg, o, p)?],
    };
    let levels = o.eq_levels(&pairs, cfg.jobs);
    let mut text = String::new();
    let mut rows = Vec::new();
    for (&(t, u), &l) in pairs.iter().zip(&levels) {
        let (ts, us) = (o.show(t), o.show(u));
        if batch.is_some() {
            text.push_str(&format!("{ts} ; {us} : {}\n", level_text(l)));
        } else {
            text.push_str(&format!("{}\n", level_text(l)));
        }
        rows.push(json!({"left": ts, "right": us, "level": level_json(l)}));
    }
    Ok(Outcome::ok(text, json!({"cutoff": o.cutoff(), "pairs": rows})))
}

fn decide(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs) -> Result<Outcome, CliError> {
    let (t, u) = pair(cfg, o, p)?;
    let base = json!({"left": o.show(t), "right": o.show(u), "cutoff": o.cutoff()});
    let mut v = base;
    Ok(match o.eq_level(t, u) {
        EqLevel::Finite(k) => {
            v["verdict"] = json!("distinguished");
            v["level"] = json!(k);
            Outcome {
                code: 1,
                text: format!("distinguished level={k}\n"),
                json: v,
            }
        }
        EqLevel::AtLeast(k) => {
            v["verdict"] = json!("equivalent-up-to");
            v["level"] = json!(k);
            Outcome::ok(format!("equivalent-up-to {k}\n"), v)
        }
    })
}

fn play(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs, trace: &mut dyn Write) -> Result<Outcome, CliError> {
    let (t, u) = pair(cfg, o, p)?;
    let pl = build_optimal_play(o, t, u)?;
    let g = o.shared_grammar();
    let mut text = format!("length {}\n", pl.len());
    let mut rows = Vec::new();
    for i in 0..=pl.len() {
        let (l, r) = pl.pairs[i];
        let (ls, rs) = (o.show(l), o.show(r));
        let rules = (i > 0).then(|| (g.rule(pl.left[i - 1]).name.clone(), g.rule(pl.right[i - 1]).name.clone()));
        match &rules {
            Some((a, b)) => text.push_str(&format!("{a}/{b} -> ({ls}, {rs}) level {}\n", pl.levels[i])),
            None => text.push_str(&format!("({ls}, {rs}) level {}\n", pl.levels[i])),
        }
        if cfg.trace {
            let _ = writeln!(trace, "play: step {i} level {}", pl.levels[i]);
        }
        rows.push(json!({"left": ls, "right": rs, "level": pl.levels[i], "rules": rules}));
    }
    Ok(Outcome::ok(text, json!({"length": pl.len(), "pairs": rows})))
}

struct Balanced {
    ctx: PlayContext,
    start: (TermId, TermId),
    b: BalancedPlay,
    path: PivotPath,
    seg: Segmentation,
}

fn balanced(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs, trace: &mut dyn Write) -> Result<Balanced, CliError> {
    let (t, u) = pair(cfg, o, p)?;
    let ctx = PlayContext::new(o.grammar());
    let (b, path) = transform_to_balanced(o, &ctx, t, u)?;
    let seg = refine_segments(o.store(), &b, &path);
    if cfg.trace {
        for (j, ph) in b.phases.iter().enumerate() {
            let _ = writeln!(
                trace,
                "balance: phase {} side {} pivot {} continuation {}",
                j + 1,
                ph.side().letter(),
                o.show(ph.step.pivot),
                ph.mu.len()
            );
        }
    }
    Ok(Balanced {
        ctx,
        start: (t, u),
        b,
        path,
        seg,
    })
}

fn balance(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs, trace: &mut dyn Write) -> Result<Outcome, CliError> {
    let x = balanced(cfg, o, p, trace)?;
    let mut text = format!(
        "pair ({}, {}) level {} d0 {} phases {}\n",
        o.show(x.start.0),
        o.show(x.start.1),
        x.b.level,
        x.b.d0,
        x.b.phases.len()
    );
    let mut rows = Vec::new();
    for (kind, j, len) in x.seg.layout(&x.b) {
        let mut row = json!({"kind": kind, "index": j, "length": len});
        let mut line = format!("{kind:5} {j:3} {len:4}");
        if kind == "rho" {
            let ph = &x.b.phases[j - 1];
            let (l, r) = ph.step.result;
            let sizes = (o.store().pressize(&[l]), o.store().pressize(&[r]));
            let pivot = ph.side().other().letter();
            line.push_str(&format!("  pivot {pivot} bal-result sizes {} {}", sizes.0, sizes.1));
            row["pivot_side"] = json!(pivot.to_string());
            row["bal_result_sizes"] = json!([sizes.0, sizes.1]);
        }
        text.push_str(&line);
        text.push('\n');
        rows.push(row);
    }
    let crucial: Vec<Value> = x
        .seg
        .crucial
        .iter()
        .map(|c| json!({"first": c.first, "end": c.end, "length": c.length, "stair": c.stair.len()}))
        .collect();
    text.push_str(&format!("close pivots {:?}\n", x.seg.close));
    Ok(Outcome::ok(
        text,
        json!({
            "left": o.show(x.start.0), "right": o.show(x.start.1), "level": x.b.level, "d0": x.b.d0,
            "phases": x.b.phases.len(), "segments": rows, "close": x.seg.close, "crucial": crucial,
        }),
    ))
}

fn verify(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs) -> Result<Outcome, CliError> {
    let x = balanced(cfg, o, p, &mut std::io::sink())?;
    let rep = verify_balanced(o, &x.ctx, &x.b, &x.path, &x.seg);
    let mut text = String::new();
    for c in &rep.checks {
        text.push_str(&format!("{} {} {}\n", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail));
    }
    Ok(Outcome {
        code: if rep.passed() { 0 } else { 1 },
        text,
        json: json!({"left": o.show(x.start.0), "right": o.show(x.start.1), "passed": rep.passed(), "checks": rep.checks}),
    })
}

fn base(o: &mut EqOracle, a: &BaseArgs) -> Result<Outcome, CliError> {
    let ctx = PlayContext::new(o.grammar());
    let p = NsgParams::new(a.n, a.s, a.g);
    let caps = Caps {
        max_size: a.max_size,
        certify: a.certify,
    };
    let full = build_full_base_capped(o, &p, ctx.consts.stepinc, caps);
    let status = if full.complete {
        "complete"
    } else if full.capped {
        "capped"
    } else {
        "undecided-pairs"
    };
    let mut text = format!("n={} s={} g={} max-size={}\n", a.n, a.s, a.g, a.max_size);
    for l in &full.bound.layers {
        text.push_str(&format!("layer {} pairs {} s={} e={}\n", l.vars, l.members, l.size, l.e));
    }
    text.push_str(&format!("E_B {}\nstatus {status}\n", full.bound.value));
    let mut v = json!({
        "params": p, "max_size": a.max_size, "layers": full.bound.layers,
        "bound": full.bound.value.to_string(), "pairs": full.candidate.len(),
        "status": status, "undecided": full.undecided.len(),
    });
    let mut code = 0;
    if a.sound {
        let s = sound_candidate_search(o, &p, ctx.consts.stepinc, &ctx.consts.c, caps);
        let same = s.candidate.pairs().map(|x| x.0).eq(full.candidate.pairs().map(|x| x.0));
        let st = serde_json::to_value(s.status).expect("status serializes");
        text.push_str(&format!(
            "sound-search {} iterations {} E_B {} equals-full-base {same}\n",
            st.as_str().unwrap_or_default(),
            s.iterations,
            s.bound.value
        ));
        v["sound_search"] = json!({"status": st, "iterations": s.iterations, "bound": s.bound.value.to_string(), "equals_full_base": same});
        if s.status == SearchStatus::Indeterminate {
            code = 3;
        }
    }
    Ok(Outcome { code, text, json: v })
}

fn pipeline(cfg: &RunConfig, o: &mut EqOracle, p: &PairArgs, trace: &mut dyn Write) -> Result<Outcome, CliError> {
    let x = match balanced(cfg, o, p, trace) {
        Ok(x) => x,
        Err(CliError::Cutoff(msg)) => {
            return Ok(Outcome {
                code: 3,
                text: format!("indeterminate: {msg}\n"),
                json: json!({"passed": false, "indeterminate": msg, "checks": []}),
            })
        }
        Err(e) => return Err(e),
    };
    let rep = verify_balanced(o, &x.ctx, &x.b, &x.path, &x.seg);
    let mut checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| json!({"name": c.name, "passed": c.passed, "detail": c.detail}))
        .collect();
    let mut code = if rep.passed() { 0 } else { 1 };
    let stepinc = x.ctx.consts.stepinc;
    for idx in 0..x.seg.crucial.len() {
        let (name, passed, detail) = match stair_checks(o, &x, idx, stepinc) {
            Ok(Ok(d)) => ("stair-sequence", true, d),
            Ok(Err(d)) => ("stair-sequence", false, d),
            Err(BasesError::AboveCutoff(j)) => {
                code = code.max(3);
                ("stair-sequence", false, format!("element {j} at the cutoff"))
            }
            Err(e) => ("stair-sequence", false, e.to_string()),
        };
        if !passed && code == 0 {
            code = 1;
        }
        checks.push(json!({"name": name, "segment": idx + 1, "passed": passed, "detail": detail}));
    }
    let mut text = String::new();
    for c in &checks {
        let ok = c["passed"].as_bool().unwrap_or(false);
        text.push_str(&format!(
            "{} {} {}\n",
            if ok { "ok  " } else { "FAIL" },
            c["name"].as_str().unwrap_or_default(),
            c["detail"].as_str().unwrap_or_default()
        ));
    }
    let passed = code == 0;
    Ok(Outcome {
        code,
        text,
        json: json!({
            "left": o.show(x.start.0), "right": o.show(x.start.1), "level": x.b.level,
            "total_length": x.b.len(), "phases": x.b.phases.len(), "passed": passed, "checks": checks,
        }),
    })
}

/// Presents crucial segment `idx` as an `(n,s,g)`-sequence, checks it, then
/// reduces it variable by variable, checking every intermediate sequence.
fn stair_checks(o: &mut EqOracle, x: &Balanced, idx: usize, stepinc: u64) -> Result<Result<String, String>, BasesError> {
    let st = present_stair_as_nsg(o, &x.ctx, &x.b, &x.path, &x.seg, idx)?;
    let problems = nsg_problems(o, &st.seq, &st.params)?;
    if !problems.is_empty() {
        return Ok(Err(problems.join("; ")));
    }
    let (mut seq, mut params) = (st.seq, st.params);
    let z = seq.len();
    let mut steps = 0;
    while params.n > 0 && !seq.is_empty() {
        match reduce_nsg_step(o, &seq, &params, stepinc) {
            Ok(r) => {
                if !r.seq.is_empty() {
                    let problems = nsg_problems(o, &r.seq, &r.params)?;
                    if !problems.is_empty() {
                        return Ok(Err(format!("after {} reductions: {}", steps + 1, problems.join("; "))));
                    }
                }
                steps += 1;
                seq = r.seq;
                params = r.params;
            }
            Err(BasesError::NothingToReduce(_)) => break,
            Err(e) => return Err(e),
        }
    }
    Ok(Ok(format!("segment {}: z={z}, {steps} reduction step(s)", idx + 1)))
}

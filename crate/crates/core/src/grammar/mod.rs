//! First-order grammars: ranked nonterminals, actions and root-rewriting rules
//! `A(x1,...,xm) -a-> E`.
//!
//! Text format (`#` starts a comment):
//!
//! ```text
//! nonterminals: A/3, B/0, C/2, D/2
//! actions: a, b
//! rule r1: A(x1,x2,x3) -b-> x2
//! rule r2: A(x1,x2,x3) -a-> C(x2,D(x2,x1))
//! ```

mod constants;
mod sink;

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;
use std::sync::Arc;

use thiserror::Error;

use crate::terms::{NontermId, Signature, TermId, TermStore};

pub use constants::GrammarConstants;
pub use sink::SinkTable;

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RuleId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RuleId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A word over rule ids.
pub type RuleWord = Vec<RuleId>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GrammarError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{name}` expects {expected} argument(s), got {found}")]
    ArityMismatch {
        line: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("line {line}: variable x{var} exceeds the arity {arity} of the left-hand side")]
    VariableOutOfRange { line: usize, var: u32, arity: usize },
    #[error("line {line}: rule `{name}` defined twice")]
    DuplicateRule { line: usize, name: String },
    #[error("line {line}: `{name}` declared twice")]
    DuplicateName { line: usize, name: String },
    #[error("line {line}: unknown nonterminal `{name}`")]
    UnknownNonterminal { line: usize, name: String },
    #[error("line {line}: unknown action `{name}`")]
    UnknownAction { line: usize, name: String },
    #[error("line {line}: left-hand side must be `{expected}`")]
    LhsShape { line: usize, expected: String },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("the grammar declares no {0}")]
    EmptySection(&'static str),
}

/// Finite right-hand side term.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rhs {
    Var(u32),
    App(NontermId, Vec<Rhs>),
}

impl Rhs {
    pub fn height(&self) -> u32 {
        match self {
            Rhs::Var(_) => 0,
            Rhs::App(_, args) => args.iter().map(|a| a.height() + 1).max().unwrap_or(0),
        }
    }

    pub fn vars(&self, out: &mut BTreeSet<u32>) {
        match self {
            Rhs::Var(i) => {
                out.insert(*i);
            }
            Rhs::App(_, args) => args.iter().for_each(|a| a.vars(out)),
        }
    }

    /// Collects every non-variable subterm.
    pub fn nonvar_subterms<'a>(&'a self, out: &mut std::collections::HashSet<&'a Rhs>) {
        if let Rhs::App(_, args) = self {
            out.insert(self);
            args.iter().for_each(|a| a.nonvar_subterms(out));
        }
    }

    /// Number of nonterminal nodes in the least presentation.
    pub fn propsize(&self) -> usize {
        let mut s = std::collections::HashSet::new();
        self.nonvar_subterms(&mut s);
        s.len()
    }

    /// `E[x_j / args[j-1]]`.
    pub fn instantiate(&self, store: &mut TermStore, args: &[TermId]) -> TermId {
        match self {
            Rhs::Var(i) => args[*i as usize - 1],
            Rhs::App(f, sub) => {
                let cs: Vec<TermId> = sub.iter().map(|a| a.instantiate(store, args)).collect();
                store.app_unchecked(*f, &cs)
            }
        }
    }

    /// The rhs itself as a stored term over variables.
    pub fn intern(&self, store: &mut TermStore) -> TermId {
        match self {
            Rhs::Var(i) => store.var(*i),
            Rhs::App(f, sub) => {
                let cs: Vec<TermId> = sub.iter().map(|a| a.intern(store)).collect();
                store.app_unchecked(*f, &cs)
            }
        }
    }

    fn write(&self, sig: &Signature, out: &mut String) {
        match self {
            Rhs::Var(i) => {
                let _ = write!(out, "x{i}");
            }
            Rhs::App(f, args) => {
                out.push_str(sig.name(*f));
                if !args.is_empty() {
                    out.push('(');
                    for (k, a) in args.iter().enumerate() {
                        if k > 0 {
                            out.push(',');
                        }
                        a.write(sig, out);
                    }
                    out.push(')');
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub lhs: NontermId,
    pub action: ActionId,
    pub rhs: Rhs,
}

/// Immutable grammar; share it behind an `Arc`.
#[derive(Clone, Debug)]
pub struct Grammar {
    sig: Arc<Signature>,
    actions: Vec<String>,
    rules: Vec<Rule>,
    by_lhs: Vec<Vec<RuleId>>,
    rule_names: HashMap<String, RuleId>,
}

impl Grammar {
    /// Builds a grammar from parts, checking the rule invariants.
    pub fn new(sig: Signature, actions: Vec<String>, rules: Vec<Rule>) -> Result<Self, GrammarError> {
        if sig.is_empty() {
            return Err(GrammarError::EmptySection("nonterminals"));
        }
        if actions.is_empty() {
            return Err(GrammarError::EmptySection("actions"));
        }
        if rules.is_empty() {
            return Err(GrammarError::EmptySection("rules"));
        }
        let mut by_lhs = vec![Vec::new(); sig.len()];
        let mut rule_names = HashMap::new();
        for (k, r) in rules.iter().enumerate() {
            let id = RuleId(k as u32);
            if rule_names.insert(r.name.clone(), id).is_some() {
                return Err(GrammarError::DuplicateRule {
                    line: 0,
                    name: r.name.clone(),
                });
            }
            let arity = sig.arity(r.lhs);
            let mut vs = BTreeSet::new();
            r.rhs.vars(&mut vs);
            if let Some(&v) = vs.iter().find(|&&v| v == 0 || v as usize > arity) {
                return Err(GrammarError::VariableOutOfRange { line: 0, var: v, arity });
            }
            check_rhs_arity(&sig, &r.rhs)?;
            if r.action.index() >= actions.len() {
                return Err(GrammarError::UnknownAction {
                    line: 0,
                    name: format!("#{}", r.action.0),
                });
            }
            by_lhs[r.lhs.index()].push(id);
        }
        Ok(Grammar {
            sig: Arc::new(sig),
            actions,
            rules,
            by_lhs,
            rule_names,
        })
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn shared_signature(&self) -> Arc<Signature> {
        self.sig.clone()
    }

    /// A fresh store over this grammar's nonterminals.
    pub fn new_store(&self) -> TermStore {
        TermStore::new(self.sig.clone())
    }

    pub fn actions(&self) -> &[String] {
        &self.actions
    }

    pub fn action_ids(&self) -> impl Iterator<Item = ActionId> {
        (0..self.actions.len() as u32).map(ActionId)
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()]
    }

    pub fn action_lookup(&self, name: &str) -> Option<ActionId> {
        self.actions.iter().position(|a| a == name).map(|k| ActionId(k as u32))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rule_ids(&self) -> impl Iterator<Item = RuleId> {
        (0..self.rules.len() as u32).map(RuleId)
    }

    pub fn rule(&self, r: RuleId) -> &Rule {
        &self.rules[r.index()]
    }

    pub fn rule_lookup(&self, name: &str) -> Option<RuleId> {
        self.rule_names.get(name).copied()
    }

    /// Rules with left-hand side `A`, in id order.
    pub fn rules_for(&self, lhs: NontermId) -> &[RuleId] {
        &self.by_lhs[lhs.index()]
    }

    pub fn max_arity(&self) -> usize {
        self.sig.max_arity()
    }

    pub fn label(&self, r: RuleId) -> ActionId {
        self.rules[r.index()].action
    }

    pub fn labels(&self, w: &[RuleId]) -> Vec<ActionId> {
        w.iter().map(|&r| self.label(r)).collect()
    }

    /// Every rule has at most one rule per (lhs, action).
    pub fn is_deterministic(&self) -> bool {
        self.by_lhs.iter().all(|rs| {
            let mut seen = BTreeSet::new();
            rs.iter().all(|&r| seen.insert(self.label(r)))
        })
    }

    pub fn format_word(&self, w: &[RuleId]) -> String {
        w.iter()
            .map(|&r| self.rule(r).name.as_str())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Parses a comma- or space-separated list of rule names; `ε` or empty is the empty word.
    pub fn parse_word(&self, text: &str) -> Result<RuleWord, GrammarError> {
        text.split(|c: char| c == ',' || c.is_whitespace())
            .filter(|s| !s.is_empty() && *s != "ε" && *s != "eps")
            .map(|s| {
                self.rule_lookup(s).ok_or_else(|| GrammarError::UnknownRule(s.to_string()))
            })
            .collect()
    }

    pub fn rhs_text(&self, rhs: &Rhs) -> String {
        let mut s = String::new();
        rhs.write(&self.sig, &mut s);
        s
    }

    /// Serializes back into the text format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let nts: Vec<String> = self
            .sig
            .ids()
            .map(|f| format!("{}/{}", self.sig.name(f), self.sig.arity(f)))
            .collect();
        let _ = writeln!(out, "nonterminals: {}", nts.join(", "));
        let _ = writeln!(out, "actions: {}", self.actions.join(", "));
        for r in &self.rules {
            let m = self.sig.arity(r.lhs);
            let lhs = if m == 0 {
                self.sig.name(r.lhs).to_string()
            } else {
                let xs: Vec<String> = (1..=m).map(|i| format!("x{i}")).collect();
                format!("{}({})", self.sig.name(r.lhs), xs.join(","))
            };
            let _ = writeln!(
                out,
                "rule {}: {} -{}-> {}",
                r.name,
                lhs,
                self.actions[r.action.index()],
                self.rhs_text(&r.rhs)
            );
        }
        out
    }
}

fn check_rhs_arity(sig: &Signature, rhs: &Rhs) -> Result<(), GrammarError> {
    if let Rhs::App(f, args) = rhs {
        if sig.arity(*f) != args.len() {
            return Err(GrammarError::ArityMismatch {
                line: 0,
                name: sig.name(*f).to_string(),
                expected: sig.arity(*f),
                found: args.len(),
            });
        }
        for a in args {
            check_rhs_arity(sig, a)?;
        }
    }
    Ok(())
}

fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    cs.next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
}

fn var_index(s: &str) -> Option<u32> {
    let d = s.strip_prefix('x')?;
    if d.is_empty() || !d.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    d.parse().ok()
}

struct RhsParser<'a> {
    s: &'a [u8],
    pos: usize,
    line: usize,
    sig: &'a Signature,
}

impl RhsParser<'_> {
    fn err(&self, m: impl Into<String>) -> GrammarError {
        GrammarError::Syntax {
            line: self.line,
            message: m.into(),
        }
    }

    fn ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn term(&mut self) -> Result<Rhs, GrammarError> {
        self.ws();
        let start = self.pos;
        while self.pos < self.s.len()
            && (self.s[self.pos].is_ascii_alphanumeric() || matches!(self.s[self.pos], b'_' | b'\''))
        {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.s[start..self.pos]).expect("ascii");
        if name.is_empty() {
            return Err(self.err("expected a term"));
        }
        if let Some(i) = var_index(name) {
            return Ok(Rhs::Var(i));
        }
        let f = self.sig.lookup(name).ok_or_else(|| GrammarError::UnknownNonterminal {
            line: self.line,
            name: name.to_string(),
        })?;
        let mut args = Vec::new();
        self.ws();
        if self.pos < self.s.len() && self.s[self.pos] == b'(' {
            self.pos += 1;
            self.ws();
            if self.pos < self.s.len() && self.s[self.pos] == b')' {
                self.pos += 1;
            } else {
                loop {
                    args.push(self.term()?);
                    self.ws();
                    match self.s.get(self.pos) {
                        Some(b',') => self.pos += 1,
                        Some(b')') => {
                            self.pos += 1;
                            break;
                        }
                        _ => return Err(self.err("expected `,` or `)`")),
                    }
                }
            }
        }
        if self.sig.arity(f) != args.len() {
            return Err(GrammarError::ArityMismatch {
                line: self.line,
                name: name.to_string(),
                expected: self.sig.arity(f),
                found: args.len(),
            });
        }
        Ok(Rhs::App(f, args))
    }
}

fn parse_rhs(text: &str, line: usize, sig: &Signature) -> Result<Rhs, GrammarError> {
    let mut p = RhsParser {
        s: text.as_bytes(),
        pos: 0,
        line,
        sig,
    };
    let t = p.term()?;
    p.ws();
    if p.pos != p.s.len() {
        return Err(p.err("trailing input after term"));
    }
    Ok(t)
}

/// Parses the grammar text format.
pub fn parse_grammar(text: &str) -> Result<Grammar, GrammarError> {
    let mut sig = Signature::new();
    let mut actions: Vec<String> = Vec::new();
    let mut rules: Vec<Rule> = Vec::new();
    let mut rule_lines: HashMap<String, usize> = HashMap::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = ln + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let syn = |m: &str| GrammarError::Syntax {
            line,
            message: m.to_string(),
        };
        if let Some(rest) = body.strip_prefix("nonterminals:") {
            for item in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, ar) = item
                    .split_once('/')
                    .ok_or_else(|| syn("expected `Name/arity`"))?;
                let name = name.trim();
                if !is_ident(name) || var_index(name).is_some() {
                    return Err(syn(&format!("invalid nonterminal name `{name}`")));
                }
                let arity: usize = ar
                    .trim()
                    .parse()
                    .map_err(|_| syn(&format!("invalid arity `{}`", ar.trim())))?;
                if sig.add(name, arity).is_none() {
                    return Err(GrammarError::DuplicateName {
                        line,
                        name: name.to_string(),
                    });
                }
            }
        } else if let Some(rest) = body.strip_prefix("actions:") {
            for name in rest.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                if !is_ident(name) {
                    return Err(syn(&format!("invalid action name `{name}`")));
                }
                if actions.iter().any(|a| a == name) {
                    return Err(GrammarError::DuplicateName {
                        line,
                        name: name.to_string(),
                    });
                }
                actions.push(name.to_string());
            }
        } else if let Some(rest) = body.strip_prefix("rule") {
            let (id, rule) = rest
                .split_once(':')
                .ok_or_else(|| syn("expected `rule <id>: <lhs> -<action>-> <rhs>`"))?;
            let id = id.trim();
            if !is_ident(id) {
                return Err(syn(&format!("invalid rule id `{id}`")));
            }
            if rule_lines.contains_key(id) {
                return Err(GrammarError::DuplicateRule {
                    line,
                    name: id.to_string(),
                });
            }
            let arrow = rule.find("->").ok_or_else(|| syn("missing `-<action>->`"))?;
            let dash = rule[..arrow]
                .rfind('-')
                .ok_or_else(|| syn("missing `-<action>->`"))?;
            let lhs_text = rule[..dash].trim();
            let act = rule[dash + 1..arrow].trim();
            let rhs_text = rule[arrow + 2..].trim();
            let action = actions
                .iter()
                .position(|a| a == act)
                .map(|k| ActionId(k as u32))
                .ok_or_else(|| GrammarError::UnknownAction {
                    line,
                    name: act.to_string(),
                })?;
            let head = lhs_text.split('(').next().unwrap_or("").trim();
            let lhs = sig.lookup(head).ok_or_else(|| GrammarError::UnknownNonterminal {
                line,
                name: head.to_string(),
            })?;
            let arity = sig.arity(lhs);
            let expected = if arity == 0 {
                head.to_string()
            } else {
                let xs: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
                format!("{head}({})", xs.join(","))
            };
            let normalized: String = lhs_text.chars().filter(|c| !c.is_whitespace()).collect();
            if normalized != expected && !(arity == 0 && normalized == format!("{head}()")) {
                return Err(GrammarError::LhsShape { line, expected });
            }
            let rhs = parse_rhs(rhs_text, line, &sig)?;
            let mut vs = BTreeSet::new();
            rhs.vars(&mut vs);
            if let Some(&v) = vs.iter().find(|&&v| v == 0 || v as usize > arity) {
                return Err(GrammarError::VariableOutOfRange { line, var: v, arity });
            }
            rule_lines.insert(id.to_string(), line);
            rules.push(Rule {
                name: id.to_string(),
                lhs,
                action,
                rhs,
            });
        } else {
            return Err(syn(
                "expected `nonterminals:`, `actions:` or `rule <id>: ...`",
            ));
        }
    }
    Grammar::new(sig, actions, rules)
}

/// Shortest sink words of `g`.
pub fn compute_sink_table(g: &Grammar) -> SinkTable {
    SinkTable::compute(g)
}

/// The bounds `m`, `hinc`, `stepinc`, `d0`..`d5`, `n`, `s`, `g`, `c` of `g`.
pub fn compute_constants(g: &Grammar) -> GrammarConstants {
    GrammarConstants::compute(g, &SinkTable::compute(g))
}

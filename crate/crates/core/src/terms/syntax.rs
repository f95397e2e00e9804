//! Inline term syntax and the line-based graph format.
//!
//! Inline: `A(D(x5,C(x2,B)),x5,B)`. A node may be labelled `@k=...` and then
//! referenced as `@k`, which is how cycles are written: `@1=C(x1,@1)`.
//!
//! Graph format, one definition per line, `#` starts a comment:
//!
//! ```text
//! node n1 = A(n2,x3,n1)
//! node n2 = B
//! node v = x5
//! root E = n1
//! ```

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use super::graph::{RawGraph, RawNode, RawRef};
use super::{TermError, TermId, TermNode, TermStore};

pub type NamedRoots = Vec<(String, TermId)>;

fn syntax(line: usize, column: usize, message: impl Into<String>) -> TermError {
    TermError::Syntax {
        line,
        column,
        message: message.into(),
    }
}

fn parse_var_name(s: &str) -> Option<u32> {
    let digits = s.strip_prefix('x')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

/// Child slot that is either a node or a label still to be resolved.
#[derive(Clone, Copy)]
enum Slot {
    Node(usize),
    Label(u32),
}

struct InlineParser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    store: &'a TermStore,
    nodes: Vec<(RawNode, Vec<Slot>)>,
    labels: HashMap<u32, usize>,
}

impl InlineParser<'_> {
    fn err(&self, msg: impl Into<String>) -> TermError {
        syntax(self.line, self.pos + 1, msg)
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn expect(&mut self, c: char) -> Result<(), TermError> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(format!("expected `{c}`")))
        }
    }

    fn number(&mut self) -> Result<u32, TermError> {
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("expected a number"))
    }

    fn ident(&mut self) -> Result<String, TermError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos < self.chars.len() && is_ident_start(self.chars[self.pos]) {
            self.pos += 1;
            while self.pos < self.chars.len() && is_ident_char(self.chars[self.pos]) {
                self.pos += 1;
            }
        }
        if start == self.pos {
            return Err(self.err("expected a nonterminal or variable"));
        }
        Ok(self.chars[start..self.pos].iter().collect())
    }

    fn term(&mut self) -> Result<Slot, TermError> {
        if self.peek() == Some('@') {
            self.pos += 1;
            let label = self.number()?;
            if self.peek() == Some('=') {
                self.pos += 1;
                let body = self.term()?;
                let Slot::Node(k) = body else {
                    return Err(self.err("a label must be bound to a term, not another label"));
                };
                if self.labels.insert(label, k).is_some() {
                    return Err(self.err(format!("label @{label} defined twice")));
                }
                return Ok(body);
            }
            return Ok(Slot::Label(label));
        }
        let col = self.pos + 1;
        let name = self.ident()?;
        if let Some(i) = parse_var_name(&name) {
            if i == 0 {
                return Err(syntax(self.line, col, "variables are numbered from x1"));
            }
            self.nodes.push((RawNode::var(i), Vec::new()));
            return Ok(Slot::Node(self.nodes.len() - 1));
        }
        let f = self
            .store
            .signature()
            .lookup(&name)
            .ok_or_else(|| syntax(self.line, col, format!("unknown nonterminal `{name}`")))?;
        let mut args = Vec::new();
        if self.peek() == Some('(') {
            self.pos += 1;
            if self.peek() != Some(')') {
                loop {
                    args.push(self.term()?);
                    if self.peek() == Some(',') {
                        self.pos += 1;
                    } else {
                        break;
                    }
                }
            }
            self.expect(')')?;
        }
        let arity = self.store.signature().arity(f);
        if arity != args.len() {
            return Err(syntax(
                self.line,
                col,
                format!("`{name}` expects {arity} argument(s), got {}", args.len()),
            ));
        }
        self.nodes.push((RawNode::app(f, Vec::new()), args));
        Ok(Slot::Node(self.nodes.len() - 1))
    }

    fn finish(self, roots: &[Slot]) -> Result<RawGraph, TermError> {
        let resolve = |s: Slot| -> Result<usize, TermError> {
            match s {
                Slot::Node(k) => Ok(k),
                Slot::Label(l) => self
                    .labels
                    .get(&l)
                    .copied()
                    .ok_or_else(|| TermError::DanglingReference(format!("@{l}"))),
            }
        };
        let mut g = RawGraph::default();
        for (node, slots) in &self.nodes {
            let mut node = node.clone();
            for &s in slots {
                node.children.push(RawRef::Node(resolve(s)?));
            }
            g.nodes.push(node);
        }
        for &r in roots {
            g.roots.push(resolve(r)?);
        }
        Ok(g)
    }
}

pub(super) fn parse_inline(store: &mut TermStore, text: &str) -> Result<TermId, TermError> {
    let mut p = InlineParser {
        chars: text.chars().collect(),
        pos: 0,
        line: 1,
        store,
        nodes: Vec::new(),
        labels: HashMap::new(),
    };
    let root = p.term()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    let g = p.finish(&[root])?;
    Ok(store.intern_graph(&g)?[0])
}

/// A node definition: its line, the node, and child names with their lines.
type Def = (usize, RawNode, Vec<(String, usize)>);

/// Parses the line-based graph format and interns all named roots.
pub fn parse_term_graph(store: &mut TermStore, text: &str) -> Result<NamedRoots, TermError> {
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut defs: Vec<Def> = Vec::new();
    let mut roots: Vec<(String, String, usize)> = Vec::new();
    for (ln, raw_line) in text.lines().enumerate() {
        let line_no = ln + 1;
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (kw, rest) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| syntax(line_no, 1, "expected `node` or `root` definition"))?;
        let (lhs, rhs) = rest
            .split_once('=')
            .ok_or_else(|| syntax(line_no, 1, "missing `=`"))?;
        let name = lhs.trim().to_string();
        if name.is_empty() || !name.chars().next().is_some_and(is_ident_start) {
            return Err(syntax(line_no, 1, "expected an identifier"));
        }
        let rhs = rhs.trim();
        match kw {
            "root" => roots.push((name, rhs.to_string(), line_no)),
            "node" => {
                if index.contains_key(&name) {
                    return Err(TermError::DuplicateNode(name));
                }
                let (head, args) = match rhs.split_once('(') {
                    Some((h, a)) => {
                        let a = a
                            .trim()
                            .strip_suffix(')')
                            .ok_or_else(|| syntax(line_no, raw_line.len(), "missing `)`"))?;
                        let args: Vec<(String, usize)> = if a.trim().is_empty() {
                            Vec::new()
                        } else {
                            a.split(',').map(|s| (s.trim().to_string(), line_no)).collect()
                        };
                        (h.trim(), args)
                    }
                    None => (rhs, Vec::new()),
                };
                let node = if let Some(i) = parse_var_name(head) {
                    if i == 0 {
                        return Err(syntax(line_no, 1, "variables are numbered from x1"));
                    }
                    if !args.is_empty() {
                        return Err(TermError::VariableWithSuccessors(i));
                    }
                    RawNode::var(i)
                } else {
                    let f = store.signature().lookup(head).ok_or_else(|| {
                        syntax(line_no, 1, format!("unknown nonterminal `{head}`"))
                    })?;
                    let arity = store.signature().arity(f);
                    if arity != args.len() {
                        return Err(syntax(
                            line_no,
                            1,
                            format!("`{head}` expects {arity} argument(s), got {}", args.len()),
                        ));
                    }
                    RawNode::app(f, Vec::new())
                };
                index.insert(name, defs.len());
                defs.push((line_no, node, args));
            }
            other => {
                return Err(syntax(
                    line_no,
                    1,
                    format!("unknown keyword `{other}`, expected `node` or `root`"),
                ))
            }
        }
    }
    let mut g = RawGraph::default();
    let mut extra: Vec<RawNode> = Vec::new();
    let base = defs.len();
    for (_, node, args) in &defs {
        let mut node = node.clone();
        for (a, _) in args {
            let r = if let Some(i) = parse_var_name(a) {
                if i == 0 {
                    return Err(TermError::VariableZero);
                }
                extra.push(RawNode::var(i));
                RawRef::Node(base + extra.len() - 1)
            } else {
                RawRef::Node(
                    *index
                        .get(a)
                        .ok_or_else(|| TermError::DanglingReference(a.clone()))?,
                )
            };
            node.children.push(r);
        }
        g.nodes.push(node);
    }
    g.nodes.extend(extra);
    for (_, target, _) in &roots {
        let k = *index
            .get(target)
            .ok_or_else(|| TermError::DanglingReference(target.clone()))?;
        g.roots.push(k);
    }
    let ids = store.intern_graph(&g)?;
    Ok(roots
        .into_iter()
        .map(|(name, _, _)| name)
        .zip(ids)
        .collect())
}

/// Nodes lying on a cycle within the subgraph reachable from `t`.
fn cyclic_nodes(store: &TermStore, t: TermId) -> HashSet<TermId> {
    let nodes = store.reachable(&[t]);
    let mut out = HashSet::new();
    for &n in &nodes {
        if store.is_finite(n) {
            continue;
        }
        let back = store.reachable(store.children(n));
        if back.contains(&n) {
            out.insert(n);
        }
    }
    out
}

pub(super) fn display(store: &TermStore, t: TermId) -> String {
    let cyc = cyclic_nodes(store, t);
    let mut labels: HashMap<TermId, usize> = HashMap::new();
    let mut out = String::new();
    write_term(store, t, &cyc, &mut labels, &mut out);
    out
}

fn write_term(
    store: &TermStore,
    t: TermId,
    cyc: &HashSet<TermId>,
    labels: &mut HashMap<TermId, usize>,
    out: &mut String,
) {
    if cyc.contains(&t) {
        if let Some(l) = labels.get(&t) {
            let _ = write!(out, "@{l}");
            return;
        }
        let l = labels.len() + 1;
        labels.insert(t, l);
        let _ = write!(out, "@{l}=");
    }
    match store.node(t) {
        TermNode::Var(i) => {
            let _ = write!(out, "x{i}");
        }
        TermNode::App(f, cs) => {
            out.push_str(store.signature().name(*f));
            if !cs.is_empty() {
                out.push('(');
                for (k, &c) in cs.iter().enumerate() {
                    if k > 0 {
                        out.push(',');
                    }
                    write_term(store, c, cyc, labels, out);
                }
                out.push(')');
            }
        }
    }
}

pub(super) fn to_graph_text(store: &TermStore, roots: &[(&str, TermId)]) -> String {
    let ids: Vec<TermId> = roots.iter().map(|r| r.1).collect();
    let nodes = store.reachable(&ids);
    let name: HashMap<TermId, String> = nodes
        .iter()
        .enumerate()
        .map(|(k, &n)| (n, format!("n{k}")))
        .collect();
    let mut out = String::new();
    for &n in &nodes {
        match store.node(n) {
            TermNode::Var(i) => {
                let _ = writeln!(out, "node {} = x{i}", name[&n]);
            }
            TermNode::App(f, cs) => {
                let args: Vec<&str> = cs.iter().map(|c| name[c].as_str()).collect();
                let _ = writeln!(
                    out,
                    "node {} = {}({})",
                    name[&n],
                    store.signature().name(*f),
                    args.join(",")
                );
            }
        }
    }
    for (r, t) in roots {
        let _ = writeln!(out, "root {r} = {}", name[t]);
    }
    out
}

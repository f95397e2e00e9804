use serde::{Deserialize, Serialize};

use crate::grammar::{compute_constants, compute_sink_table, Grammar};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NontermSummary {
    pub name: String,
    pub arity: usize,
    pub rules: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleSummary {
    pub name: String,
    pub text: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SinkSummary {
    pub nonterminal: String,
    pub var: usize,
    pub word: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: String,
}

/// What `validate` prints, in a form that reads back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub path: String,
    pub nonterminals: Vec<NontermSummary>,
    pub actions: Vec<String>,
    pub rules: Vec<RuleSummary>,
    pub deterministic: bool,
    pub sinks: Vec<SinkSummary>,
    /// `d0` through `d5`.
    pub constants: Vec<ConstantRow>,
}

impl ValidateReport {
    pub fn new(path: &str, g: &Grammar) -> Self {
        let sig = g.signature();
        let nonterminals = sig
            .ids()
            .map(|f| NontermSummary {
                name: sig.name(f).to_string(),
                arity: sig.arity(f),
                rules: g.rules_for(f).len(),
            })
            .collect();
        let rules = g
            .rules()
            .iter()
            .map(|r| RuleSummary {
                name: r.name.clone(),
                text: format!(
                    "{} -{}-> {}",
                    lhs_text(sig.name(r.lhs), sig.arity(r.lhs)),
                    g.action_name(r.action),
                    g.rhs_text(&r.rhs)
                ),
            })
            .collect();
        let table = compute_sink_table(g);
        let sinks = table
            .entries()
            .map(|(f, i, w)| SinkSummary {
                nonterminal: sig.name(f).to_string(),
                var: i,
                word: g.format_word(w),
            })
            .collect();
        let constants = compute_constants(g)
            .rows()
            .into_iter()
            .filter(|(n, _)| n.starts_with('d'))
            .map(|(n, v)| ConstantRow {
                name: n.to_string(),
                value: v,
            })
            .collect();
        ValidateReport {
            path: path.to_string(),
            nonterminals,
            actions: g.actions().to_vec(),
            rules,
            deterministic: g.is_deterministic(),
            sinks,
            constants,
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("ok {}\n", self.path);
        let nts: Vec<String> = self.nonterminals.iter().map(|n| format!("{}/{}", n.name, n.arity)).collect();
        s.push_str(&format!("nonterminals {}\n", nts.join(" ")));
        s.push_str(&format!("actions {}\n", self.actions.join(" ")));
        s.push_str(&format!("rules {} deterministic {}\n", self.rules.len(), self.deterministic));
        for c in &self.constants {
            s.push_str(&format!("{:3} {}\n", c.name, c.value));
        }
        s
    }
}

fn lhs_text(name: &str, arity: usize) -> String {
    if arity == 0 {
        return name.to_string();
    }
    let xs: Vec<String> = (1..=arity).map(|i| format!("x{i}")).collect();
    format!("{name}({})", xs.join(","))
}

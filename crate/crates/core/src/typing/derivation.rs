use std::fmt;

use serde::Serialize;
use serde_json::{json, Value};

use crate::syntax::Expr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Rule {
    #[serde(rename = "T-tr")]
    True,
    #[serde(rename = "T-fa")]
    False,
    #[serde(rename = "T-or")]
    Or,
    #[serde(rename = "T-neg")]
    Neg,
    #[serde(rename = "T-ex")]
    Exists,
    #[serde(rename = "T-sub")]
    Sub,
    #[serde(rename = "T-var")]
    Var,
    #[serde(rename = "T-app")]
    App,
    #[serde(rename = "G-c")]
    GuardC,
    #[serde(rename = "G-i")]
    GuardI,
    #[serde(rename = "T-and")]
    And,
    #[serde(rename = "T-imp")]
    Implies,
    #[serde(rename = "T-iff")]
    Iff,
    #[serde(rename = "T-all")]
    Forall,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::True => "T-tr",
            Rule::False => "T-fa",
            Rule::Or => "T-or",
            Rule::Neg => "T-neg",
            Rule::Exists => "T-ex",
            Rule::Sub => "T-sub",
            Rule::Var => "T-var",
            Rule::App => "T-app",
            Rule::GuardC => "G-c",
            Rule::GuardI => "G-i",
            Rule::And => "T-and",
            Rule::Implies => "T-imp",
            Rule::Iff => "T-iff",
            Rule::Forall => "T-all",
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A node of a typing derivation: `rule` concludes `expr : ty` from its
/// premises. Side conditions are membership and subtype facts that the rule
/// checks without a sub-derivation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub rule: Rule,
    pub expr: Expr,
    pub ty: String,
    pub side_conditions: Vec<String>,
    pub premises: Vec<Derivation>,
}

impl Derivation {
    pub fn leaf(rule: Rule, expr: Expr, ty: &str, side_conditions: Vec<String>) -> Self {
        Derivation { rule, expr, ty: ty.to_string(), side_conditions, premises: Vec::new() }
    }

    pub fn node(rule: Rule, expr: Expr, ty: &str, side_conditions: Vec<String>, premises: Vec<Derivation>) -> Self {
        Derivation { rule, expr, ty: ty.to_string(), side_conditions, premises }
    }

    pub fn size(&self) -> usize {
        1 + self.premises.iter().map(Derivation::size).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.premises.iter().map(Derivation::depth).max().unwrap_or(0)
    }

    /// Rules of the leftmost path from the root.
    pub fn spine(&self) -> Vec<Rule> {
        let mut out = vec![self.rule];
        let mut node = self;
        while let Some(first) = node.premises.first() {
            out.push(first.rule);
            node = first;
        }
        out
    }

    /// Rules in preorder.
    pub fn rules(&self) -> Vec<Rule> {
        let mut out = vec![self.rule];
        for p in &self.premises {
            out.extend(p.rules());
        }
        out
    }

    /// One line per node, children indented two spaces below their parent.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.render_into(0, &mut out);
        out
    }

    fn render_into(&self, depth: usize, out: &mut String) {
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("{} ⊢ {} : {}", self.rule, self.expr, self.ty));
        match self.premises.len() {
            0 => {}
            1 => out.push_str("  (1 premise)"),
            n => out.push_str(&format!("  ({n} premises)")),
        }
        if !self.side_conditions.is_empty() {
            out.push_str("  where ");
            out.push_str(&self.side_conditions.join(", "));
        }
        out.push('\n');
        for p in &self.premises {
            p.render_into(depth + 1, out);
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule.name(),
            "expr": self.expr.to_string(),
            "type": self.ty,
            "side_conditions": self.side_conditions,
            "children": self.premises.iter().map(Derivation::to_json).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

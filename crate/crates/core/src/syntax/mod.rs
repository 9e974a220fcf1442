//! Abstract syntax, the surface grammar and the canonical printer.

mod lexer;
mod parser;
mod printer;

use std::collections::BTreeSet;
use std::fmt;

use crate::span::Span;
use crate::vocabulary::Vocabulary;

pub use lexer::{tokenize, Token, TokenKind};
pub use parser::{parse_formula, parse_term, parse_theory, ParseError, ParseErrorKind};
pub use printer::{print_formula, print_term};

/// Predicate name used for built-in equality atoms.
pub const EQ: &str = "=";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    /// Function application; object symbols are zero-ary applications.
    Apply(String, Vec<Term>),
    Nat(u64),
    /// `` `s ``, a reference to the concept of `s`.
    ConceptRef(String),
    /// `@s`, the concept object itself. Grounding turns references into these.
    Concept(String),
    /// `$(c)(args)` in term position.
    Deref(Box<Term>, Vec<Term>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    Atom(String, Vec<Term>),
    DerefAtom(Term, Vec<Term>),
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, String, Box<Formula>),
    Forall(String, String, Box<Formula>),
    /// `<<c: f>>`
    GuardC(Box<Formula>),
    /// `<<i: f>>`
    GuardI(Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Term(Term),
    Formula(Formula),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::Apply(name.to_string(), args)
    }

    pub fn constant(name: &str) -> Term {
        Term::Apply(name.to_string(), Vec::new())
    }

    pub fn variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
            Term::Deref(head, args) => {
                head.collect_vars(out);
                args.iter().for_each(|a| a.collect_vars(out));
            }
            Term::Nat(_) | Term::ConceptRef(_) | Term::Concept(_) => {}
        }
    }

    pub fn mentions(&self, var: &str) -> bool {
        match self {
            Term::Var(x) => x == var,
            Term::Apply(_, args) => args.iter().any(|a| a.mentions(var)),
            Term::Deref(head, args) => head.mentions(var) || args.iter().any(|a| a.mentions(var)),
            Term::Nat(_) | Term::ConceptRef(_) | Term::Concept(_) => false,
        }
    }

    pub fn is_intensional(&self) -> bool {
        match self {
            Term::ConceptRef(_) | Term::Deref(..) => true,
            Term::Apply(_, args) => args.iter().any(Term::is_intensional),
            Term::Var(_) | Term::Nat(_) | Term::Concept(_) => false,
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            Term::Apply(_, args) => args.iter().map(Term::node_count).sum(),
            Term::Deref(head, args) => head.node_count() + args.iter().map(Term::node_count).sum::<usize>(),
            _ => 0,
        }
    }

    /// Replace free occurrences of `var` by `by`.
    pub fn substitute(&self, var: &str, by: &Term) -> Term {
        match self {
            Term::Var(x) if x == var => by.clone(),
            Term::Apply(f, args) => Term::Apply(f.clone(), args.iter().map(|a| a.substitute(var, by)).collect()),
            Term::Deref(head, args) => Term::Deref(
                Box::new(head.substitute(var, by)),
                args.iter().map(|a| a.substitute(var, by)).collect(),
            ),
            other => other.clone(),
        }
    }
}

impl Formula {
    pub fn atom(pred: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(pred.to_string(), args)
    }

    pub fn eq(lhs: Term, rhs: Term) -> Formula {
        Formula::Atom(EQ.to_string(), vec![lhs, rhs])
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(var: &str, ty: &str, body: Formula) -> Formula {
        Formula::Exists(var.to_string(), ty.to_string(), Box::new(body))
    }

    pub fn forall(var: &str, ty: &str, body: Formula) -> Formula {
        Formula::Forall(var.to_string(), ty.to_string(), Box::new(body))
    }

    /// Right-nested conjunction; `True` when empty.
    pub fn conjunction(items: Vec<Formula>) -> Formula {
        fold_right(items, Formula::and).unwrap_or(Formula::True)
    }

    /// Right-nested disjunction; `False` when empty.
    pub fn disjunction(items: Vec<Formula>) -> Formula {
        fold_right(items, Formula::or).unwrap_or(Formula::False)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let terms = |ts: &[Term], bound: &Vec<String>, out: &mut BTreeSet<String>| {
            for t in ts {
                out.extend(t.variables().into_iter().filter(|v| !bound.contains(v)));
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(_, args) => terms(args, bound, out),
            Formula::DerefAtom(head, args) => {
                terms(std::slice::from_ref(head), bound, out);
                terms(args, bound, out);
            }
            Formula::Not(f) | Formula::GuardC(f) | Formula::GuardI(f) => f.collect_free(bound, out),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(x, _, body) | Formula::Forall(x, _, body) => {
                bound.push(x.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Whether the formula contains references or dereferences.
    pub fn is_intensional(&self) -> bool {
        match self {
            Formula::True | Formula::False => false,
            Formula::Atom(_, args) => args.iter().any(Term::is_intensional),
            Formula::DerefAtom(..) => true,
            Formula::Not(f) | Formula::GuardC(f) | Formula::GuardI(f) => f.is_intensional(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_intensional() || b.is_intensional()
            }
            Formula::Exists(_, _, f) | Formula::Forall(_, _, f) => f.is_intensional(),
        }
    }

    pub fn has_guards(&self) -> bool {
        match self {
            Formula::GuardC(_) | Formula::GuardI(_) => true,
            Formula::Not(f) | Formula::Exists(_, _, f) | Formula::Forall(_, _, f) => f.has_guards(),
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.has_guards() || b.has_guards()
            }
            _ => false,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::Not(f) | Formula::GuardC(f) | Formula::GuardI(f) => vec![f],
            Formula::Exists(_, _, f) | Formula::Forall(_, _, f) => vec![f],
            Formula::Or(a, b) | Formula::And(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => vec![a, b],
            _ => Vec::new(),
        }
    }

    pub fn node_count(&self) -> usize {
        let own = match self {
            Formula::Atom(_, args) => args.iter().map(Term::node_count).sum(),
            Formula::DerefAtom(head, args) => head.node_count() + args.iter().map(Term::node_count).sum::<usize>(),
            _ => 0,
        };
        1 + own + self.children().into_iter().map(Formula::node_count).sum::<usize>()
    }

    /// Number of atomic formulas (predicate, equality and dereference atoms).
    pub fn atom_count(&self) -> usize {
        match self {
            Formula::Atom(..) | Formula::DerefAtom(..) => 1,
            _ => self.children().into_iter().map(Formula::atom_count).sum(),
        }
    }

    /// Rewrite `&`, `=>`, `<=>` and `!` into `~`, `|` and `?` only.
    pub fn desugar(&self) -> Formula {
        match self {
            Formula::True | Formula::False | Formula::Atom(..) | Formula::DerefAtom(..) => self.clone(),
            Formula::Not(f) => Formula::not(f.desugar()),
            Formula::Or(a, b) => Formula::or(a.desugar(), b.desugar()),
            Formula::And(a, b) => Formula::not(Formula::or(Formula::not(a.desugar()), Formula::not(b.desugar()))),
            Formula::Implies(a, b) => Formula::or(Formula::not(a.desugar()), b.desugar()),
            Formula::Iff(a, b) => {
                Formula::and(Formula::implies((**a).clone(), (**b).clone()), Formula::implies((**b).clone(), (**a).clone()))
                    .desugar()
            }
            Formula::Exists(x, t, f) => Formula::exists(x, t, f.desugar()),
            Formula::Forall(x, t, f) => Formula::not(Formula::exists(x, t, Formula::not(f.desugar()))),
            Formula::GuardC(f) => Formula::GuardC(Box::new(f.desugar())),
            Formula::GuardI(f) => Formula::GuardI(Box::new(f.desugar())),
        }
    }

    /// Replace free occurrences of `var` by `by` (no capture check: `by` is
    /// expected to be ground).
    pub fn substitute(&self, var: &str, by: &Term) -> Formula {
        let sub = |ts: &[Term]| ts.iter().map(|t| t.substitute(var, by)).collect::<Vec<_>>();
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), sub(args)),
            Formula::DerefAtom(h, args) => Formula::DerefAtom(h.substitute(var, by), sub(args)),
            Formula::Not(f) => Formula::not(f.substitute(var, by)),
            Formula::GuardC(f) => Formula::GuardC(Box::new(f.substitute(var, by))),
            Formula::GuardI(f) => Formula::GuardI(Box::new(f.substitute(var, by))),
            Formula::Or(a, b) => Formula::or(a.substitute(var, by), b.substitute(var, by)),
            Formula::And(a, b) => Formula::and(a.substitute(var, by), b.substitute(var, by)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(var, by), b.substitute(var, by)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(var, by), b.substitute(var, by)),
            Formula::Exists(x, _, _) | Formula::Forall(x, _, _) if x == var => self.clone(),
            Formula::Exists(x, t, f) => Formula::exists(x, t, f.substitute(var, by)),
            Formula::Forall(x, t, f) => Formula::forall(x, t, f.substitute(var, by)),
        }
    }
}

fn fold_right(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Option<Formula> {
    let mut acc = items.pop()?;
    while let Some(next) = items.pop() {
        acc = join(next, acc);
    }
    Some(acc)
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Term(t) => t.fmt(f),
            Expr::Formula(x) => x.fmt(f),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Axiom {
    pub label: String,
    pub formula: Formula,
    pub span: Span,
}

/// `define f(`a, ...) = `v`: one row of a concept-valued function.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptFact {
    pub function: String,
    pub args: Vec<String>,
    pub value: String,
    pub span: Span,
}

#[derive(Debug, Clone)]
pub struct Theory {
    pub vocabulary: Vocabulary,
    pub axioms: Vec<Axiom>,
    pub concept_facts: Vec<ConceptFact>,
}

impl Theory {
    pub fn axiom(&self, label: &str) -> Option<&Axiom> {
        self.axioms.iter().find(|a| a.label == label)
    }
}

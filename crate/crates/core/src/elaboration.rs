//! Expansion of implicit guards `<<c: ψ>>` and `<<i: ψ>>` into explicit
//! type-predicate prefixes.

use std::collections::BTreeSet;

use crate::syntax::{Formula, Term, EQ};
use crate::typing::checker::{guard_prefix, spine};
use crate::typing::{TypeError, TypeErrorKind, TypingContext};
use crate::vocabulary::{Vocabulary, CONCEPT, NAT};

/// An argument occurrence whose principal type is strictly above the type
/// its position expects. `path` is relative to the scanned body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardTarget {
    pub term: Term,
    pub expected: String,
    pub principal: String,
    pub path: Vec<usize>,
}

impl GuardTarget {
    pub fn atom(&self) -> Formula {
        Formula::atom(&self.expected, vec![self.term.clone()])
    }
}

/// Targets of `body` in preorder, first occurrence kept per (term, type).
pub fn guard_targets(vocab: &Vocabulary, ctx: &TypingContext, body: &Formula) -> Result<Vec<GuardTarget>, TypeError> {
    let mut scan = Scan { vocab, ctx: ctx.clone(), bound: Vec::new(), path: Vec::new(), out: Vec::new() };
    scan.formula(body)?;
    Ok(scan.out)
}

/// Replace every guard wrapper, innermost first, by its explicit form.
pub fn elaborate(vocab: &Vocabulary, ctx: &TypingContext, formula: &Formula) -> Result<Formula, TypeError> {
    let mut ctx = ctx.clone();
    rewrite(vocab, &mut ctx, formula, &mut Vec::new())
}

fn rewrite(vocab: &Vocabulary, ctx: &mut TypingContext, f: &Formula, path: &mut Vec<usize>) -> Result<Formula, TypeError> {
    if !f.has_guards() {
        return Ok(f.clone());
    }
    let mut child = |g: &Formula, i: usize, ctx: &mut TypingContext| {
        path.push(i);
        let r = rewrite(vocab, ctx, g, path);
        path.pop();
        r
    };
    Ok(match f {
        Formula::Not(g) => Formula::not(child(g, 0, ctx)?),
        Formula::Or(a, b) => Formula::or(child(a, 0, ctx)?, child(b, 1, ctx)?),
        Formula::And(a, b) => Formula::and(child(a, 0, ctx)?, child(b, 1, ctx)?),
        Formula::Implies(a, b) => Formula::implies(child(a, 0, ctx)?, child(b, 1, ctx)?),
        Formula::Iff(a, b) => Formula::iff(child(a, 0, ctx)?, child(b, 1, ctx)?),
        Formula::Exists(x, t, g) | Formula::Forall(x, t, g) => {
            let mark = ctx.len();
            ctx.push_var(x, t);
            let body = child(g, 0, ctx);
            ctx.truncate(mark);
            let body = body?;
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(x, t, body)
            } else {
                Formula::forall(x, t, body)
            }
        }
        Formula::GuardC(g) | Formula::GuardI(g) => {
            let body = child(g, 0, ctx)?;
            let guards: Vec<Formula> = guard_targets(vocab, ctx, &body)
                .map_err(|mut e| {
                    let mut full = path.clone();
                    full.push(0);
                    full.extend(e.path);
                    e.path = full;
                    e
                })?
                .iter()
                .map(GuardTarget::atom)
                .collect();
            if guards.is_empty() {
                body
            } else if matches!(f, Formula::GuardC(_)) {
                let mut items = guards;
                items.push(body);
                Formula::conjunction(items)
            } else {
                Formula::implies(Formula::conjunction(guards), body)
            }
        }
        _ => f.clone(),
    })
}

struct Scan<'v> {
    vocab: &'v Vocabulary,
    ctx: TypingContext,
    /// Variables bound between the wrapper and the current node.
    bound: Vec<String>,
    path: Vec<usize>,
    out: Vec<GuardTarget>,
}

impl Scan<'_> {
    fn formula(&mut self, f: &Formula) -> Result<(), TypeError> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(p, args) if p == EQ => self.each(args, |s, a| s.subterms(a)),
            Formula::Atom(p, args) => {
                let Some(sig) = self.ctx.symbol(p) else {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, &self.path, f));
                };
                let expected = sig.args.clone();
                self.arguments(f, &expected, args)
            }
            Formula::DerefAtom(..) => Err(TypeError::new(TypeErrorKind::IntensionalNotGrounded, &self.path, f)),
            Formula::Exists(x, t, body) | Formula::Forall(x, t, body) => {
                let mark = self.ctx.len();
                self.ctx.push_var(x, t);
                self.bound.push(x.clone());
                self.path.push(0);
                let r = self.formula(body);
                self.path.pop();
                self.bound.pop();
                self.ctx.truncate(mark);
                r
            }
            Formula::And(..) => {
                let conjuncts = spine(f);
                let n = guard_prefix(self.vocab, &conjuncts[..conjuncts.len() - 1]).len();
                let mark = self.ctx.len();
                let mut node = f;
                let mut depth = 0;
                for conjunct in &conjuncts[..n] {
                    let Formula::And(_, rest) = node else { unreachable!() };
                    self.path.push(0);
                    let r = self.formula(conjunct);
                    self.path.pop();
                    if let Err(e) = r {
                        self.path.truncate(self.path.len() - depth);
                        self.ctx.truncate(mark);
                        return Err(e);
                    }
                    self.refine(conjunct);
                    self.path.push(1);
                    depth += 1;
                    node = rest;
                }
                let r = self.plain(node);
                self.path.truncate(self.path.len() - depth);
                self.ctx.truncate(mark);
                r
            }
            Formula::Implies(a, b) => {
                let antecedent = spine(a);
                let all_guards = guard_prefix(self.vocab, &antecedent).len() == antecedent.len();
                self.path.push(0);
                let r = self.formula(a);
                self.path.pop();
                r?;
                let mark = self.ctx.len();
                if all_guards {
                    antecedent.iter().for_each(|g| self.refine(g));
                }
                self.path.push(1);
                let r = self.formula(b);
                self.path.pop();
                self.ctx.truncate(mark);
                r
            }
            _ => self.plain(f),
        }
    }

    /// Record the type asserted by a guard atom for the rest of the scope.
    fn refine(&mut self, guard: &Formula) {
        let Formula::Atom(ty, args) = guard else { return };
        if let Ok(found) = self.principal(&args[0]) {
            if !self.vocab.conforms(&found, ty) {
                self.ctx.push_term(args[0].clone(), ty);
            }
        }
    }

    fn plain(&mut self, f: &Formula) -> Result<(), TypeError> {
        match f {
            Formula::And(a, b) => {
                self.path.push(0);
                let r = self.formula(a);
                self.path.pop();
                r?;
                self.path.push(1);
                let r = self.formula(b);
                self.path.pop();
                r
            }
            Formula::True
            | Formula::False
            | Formula::Atom(..)
            | Formula::DerefAtom(..)
            | Formula::Exists(..)
            | Formula::Forall(..)
            | Formula::Implies(..) => self.formula(f),
            _ => {
                for (i, c) in f.children().into_iter().enumerate() {
                    self.path.push(i);
                    let r = self.formula(c);
                    self.path.pop();
                    r?;
                }
                Ok(())
            }
        }
    }

    fn each(&mut self, args: &[Term], mut visit: impl FnMut(&mut Self, &Term) -> Result<(), TypeError>) -> Result<(), TypeError> {
        for (i, a) in args.iter().enumerate() {
            self.path.push(i);
            let r = visit(self, a);
            self.path.pop();
            r?;
        }
        Ok(())
    }

    fn arguments(&mut self, owner: &dyn std::fmt::Display, expected: &[String], args: &[Term]) -> Result<(), TypeError> {
        if expected.len() != args.len() {
            return Err(TypeError::mismatch(
                TypeErrorKind::ArityMismatch,
                &self.path,
                owner,
                &expected.len().to_string(),
                &args.len().to_string(),
            ));
        }
        self.each(args, |s, a| {
            let i = *s.path.last().expect("pushed by each");
            s.argument(a, &expected[i])?;
            s.subterms(a)
        })
    }

    fn subterms(&mut self, t: &Term) -> Result<(), TypeError> {
        match t {
            Term::Apply(f, args) if !args.is_empty() => {
                let Some(sig) = self.ctx.symbol(f) else {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, &self.path, t));
                };
                let expected = sig.args.clone();
                self.arguments(t, &expected, args)
            }
            Term::Deref(..) => Err(TypeError::new(TypeErrorKind::IntensionalNotGrounded, &self.path, t)),
            _ => Ok(()),
        }
    }

    fn argument(&mut self, arg: &Term, expected: &str) -> Result<(), TypeError> {
        if let Term::Concept(s) | Term::ConceptRef(s) = arg {
            if self.vocab.extension(expected).is_some_and(|m| m.contains(s)) {
                return Ok(());
            }
        }
        let principal = self.principal(arg)?;
        if self.vocab.conforms(&principal, expected) {
            return Ok(());
        }
        if !self.vocab.strictly_below(expected, &principal) {
            return Err(TypeError::mismatch(TypeErrorKind::IncomparableTypes, &self.path, arg, expected, &principal));
        }
        let vars: BTreeSet<String> = arg.variables();
        if self.bound.iter().any(|x| vars.contains(x)) {
            return Ok(());
        }
        if !self.out.iter().any(|g| g.term == *arg && g.expected == expected) {
            self.out.push(GuardTarget {
                term: arg.clone(),
                expected: expected.to_string(),
                principal,
                path: self.path.clone(),
            });
        }
        Ok(())
    }

    /// The declared type of a term, without checking its arguments.
    fn principal(&self, t: &Term) -> Result<String, TypeError> {
        if let Some(ty) = self.ctx.lookup(t) {
            return Ok(ty.to_string());
        }
        match t {
            Term::Var(_) => Err(TypeError::new(TypeErrorKind::UnboundVariable, &self.path, t)),
            Term::Nat(_) => Ok(NAT.to_string()),
            Term::Concept(_) | Term::ConceptRef(_) => Ok(CONCEPT.to_string()),
            Term::Deref(..) => Err(TypeError::new(TypeErrorKind::IntensionalNotGrounded, &self.path, t)),
            Term::Apply(f, _) => match self.ctx.symbol(f) {
                Some(sig) if sig.is_predicate() => Err(TypeError::new(TypeErrorKind::PredicateAsTerm, &self.path, t)),
                Some(sig) => Ok(sig.result.clone()),
                None => Err(TypeError::new(TypeErrorKind::UnknownSymbol, &self.path, t)),
            },
        }
    }
}

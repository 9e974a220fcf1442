//! Node-local re-checking of derivations against the rule schemas, using a
//! set of annotations as the context. Shares no code with the checker.

use std::collections::HashSet;

use crate::syntax::{Expr, Formula, Term, EQ};
use crate::vocabulary::{equality_key, Vocabulary, BOOL, CONCEPT, NAT, UNIVERSE};

use super::derivation::{Derivation, Rule};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Annotation {
    /// Symbol key with argument types and result type.
    Symbol(String, Vec<String>, String),
    Term(Term, String),
}

struct Validator<'v> {
    vocab: &'v Vocabulary,
}

/// Accept `d` iff every node instantiates its rule's schema under the
/// initial context of `vocab` extended along the derivation.
pub fn validate_derivation(vocab: &Vocabulary, d: &Derivation) -> Result<(), String> {
    let mut ctx: HashSet<Annotation> = HashSet::new();
    for (key, sig, _) in vocab.signatures() {
        ctx.insert(Annotation::Symbol(key.to_string(), sig.args.clone(), sig.result.clone()));
    }
    Validator { vocab }.node(&ctx, d)
}

fn fail<T>(d: &Derivation, why: &str) -> Result<T, String> {
    Err(format!("{} ⊢ {} : {}: {why}", d.rule, d.expr, d.ty))
}

impl<'v> Validator<'v> {
    fn node(&self, ctx: &HashSet<Annotation>, d: &Derivation) -> Result<(), String> {
        match (&d.rule, &d.expr) {
            (Rule::True, Expr::Formula(Formula::True)) | (Rule::False, Expr::Formula(Formula::False)) => {
                self.bool_with(d, 0)
            }
            (Rule::Neg, Expr::Formula(Formula::Not(a))) => {
                self.bool_with(d, 1)?;
                self.formula_premise(ctx, d, 0, a)
            }
            (Rule::Or, Expr::Formula(Formula::Or(a, b)))
            | (Rule::And, Expr::Formula(Formula::And(a, b)))
            | (Rule::Implies, Expr::Formula(Formula::Implies(a, b)))
            | (Rule::Iff, Expr::Formula(Formula::Iff(a, b))) => {
                self.bool_with(d, 2)?;
                self.formula_premise(ctx, d, 0, a)?;
                self.formula_premise(ctx, d, 1, b)
            }
            (Rule::Exists, Expr::Formula(Formula::Exists(x, t, body)))
            | (Rule::Forall, Expr::Formula(Formula::Forall(x, t, body))) => {
                self.bool_with(d, 1)?;
                if !self.vocab.has_type(t) {
                    return fail(d, "unknown quantifier type");
                }
                let mut inner: HashSet<Annotation> = ctx
                    .iter()
                    .filter(|a| !matches!(a, Annotation::Term(term, _) if term.mentions(x)))
                    .cloned()
                    .collect();
                inner.insert(Annotation::Term(Term::Var(x.clone()), t.clone()));
                self.formula_premise(&inner, d, 0, body)
            }
            (Rule::GuardC, Expr::Formula(f @ Formula::And(..))) => {
                let mut items = Vec::new();
                let mut node = f;
                while let Formula::And(a, b) = node {
                    items.push(&**a);
                    node = b;
                }
                let n = d.premises.len().checked_sub(1).filter(|n| *n >= 1 && *n <= items.len());
                let Some(n) = n else { return fail(d, "wrong number of premises") };
                let mut body = f;
                for _ in 0..n {
                    let Formula::And(_, b) = body else { unreachable!() };
                    body = b;
                }
                self.guards(ctx, d, &items[..n], body)
            }
            (Rule::GuardI, Expr::Formula(Formula::Implies(ante, body))) => {
                let mut items = Vec::new();
                let mut node = &**ante;
                while let Formula::And(a, b) = node {
                    items.push(&**a);
                    node = b;
                }
                items.push(node);
                if d.premises.len() != items.len() + 1 {
                    return fail(d, "wrong number of premises");
                }
                self.guards(ctx, d, &items, body)
            }
            (Rule::Sub, Expr::Term(t)) => {
                let [p] = d.premises.as_slice() else { return fail(d, "T-sub takes one premise") };
                if p.expr != Expr::Term(t.clone()) {
                    return fail(d, "premise is about a different term");
                }
                if !self.vocab.conforms(&p.ty, &d.ty) {
                    return fail(d, "premise type is not a subtype");
                }
                self.node(ctx, p)
            }
            (Rule::Var, Expr::Term(t)) => {
                if !d.premises.is_empty() || !ctx.contains(&Annotation::Term(t.clone(), d.ty.clone())) {
                    return fail(d, "no such annotation in the context");
                }
                Ok(())
            }
            (Rule::App, Expr::Term(t)) => self.term_app(ctx, d, t),
            (Rule::App, Expr::Formula(Formula::Atom(p, args))) => {
                if d.ty != BOOL {
                    return fail(d, "atoms have type Bool");
                }
                let key = if p == EQ {
                    let Some(Annotation::Symbol(k, ..)) = self.equality_annotation(ctx, d) else {
                        return fail(d, "no equality instance matches the premises");
                    };
                    k
                } else {
                    p.clone()
                };
                self.apply(ctx, d, &key, args)
            }
            _ => fail(d, "conclusion does not match the rule"),
        }
    }

    fn bool_with(&self, d: &Derivation, premises: usize) -> Result<(), String> {
        if d.ty != BOOL || d.premises.len() != premises {
            return fail(d, "bad type or premise count");
        }
        Ok(())
    }

    fn formula_premise(&self, ctx: &HashSet<Annotation>, d: &Derivation, i: usize, f: &Formula) -> Result<(), String> {
        let p = &d.premises[i];
        if p.expr != Expr::Formula(f.clone()) || p.ty != BOOL {
            return fail(d, &format!("premise {i} does not conclude the subformula at Bool"));
        }
        self.node(ctx, p)
    }

    fn guards(&self, ctx: &HashSet<Annotation>, d: &Derivation, atoms: &[&Formula], body: &Formula) -> Result<(), String> {
        let mut inner = ctx.clone();
        for (atom, p) in atoms.iter().zip(&d.premises) {
            let Formula::Atom(ty, args) = atom else { return fail(d, "guard is not an atom") };
            if !self.vocab.has_type(ty) || args.len() != 1 {
                return fail(d, "guard is not a type-predicate atom");
            }
            if p.expr != Expr::Term(args[0].clone()) || p.ty != UNIVERSE {
                return fail(d, "guard premise must type the guarded term at Universe");
            }
            self.node(ctx, p)?;
            inner.insert(Annotation::Term(args[0].clone(), ty.clone()));
        }
        let last = d.premises.last().expect("checked by caller");
        if last.expr != Expr::Formula(body.clone()) || last.ty != BOOL {
            return fail(d, "last premise must conclude the guarded body");
        }
        self.node(&inner, last)
    }

    fn term_app(&self, ctx: &HashSet<Annotation>, d: &Derivation, t: &Term) -> Result<(), String> {
        match t {
            Term::Nat(_) if d.ty == NAT && d.premises.is_empty() => Ok(()),
            Term::Concept(s) | Term::ConceptRef(s) if d.premises.is_empty() => {
                let ok = if d.ty == CONCEPT {
                    self.vocab.is_concept(s)
                } else {
                    self.vocab.extension(&d.ty).is_some_and(|m| m.contains(s))
                };
                if ok { Ok(()) } else { fail(d, "concept is not a member of the type") }
            }
            Term::Apply(f, args) => self.apply(ctx, d, f, args),
            _ => fail(d, "T-app needs an application"),
        }
    }

    fn signature(&self, ctx: &HashSet<Annotation>, key: &str) -> Option<(Vec<String>, String)> {
        ctx.iter().find_map(|a| match a {
            Annotation::Symbol(k, args, res) if k == key => Some((args.clone(), res.clone())),
            _ => None,
        })
    }

    /// An equality instance whose argument type matches every premise and
    /// context annotation used for the arguments.
    fn equality_annotation(&self, ctx: &HashSet<Annotation>, d: &Derivation) -> Option<Annotation> {
        let Expr::Formula(Formula::Atom(_, args)) = &d.expr else { return None };
        self.vocab
            .types()
            .map(|t| equality_key(&t.name))
            .filter_map(|k| self.signature(ctx, &k).map(|(a, r)| Annotation::Symbol(k, a, r)))
            .find(|a| {
                let Annotation::Symbol(_, tys, _) = a else { return false };
                let mut premises = d.premises.iter().peekable();
                args.iter().zip(tys).all(|(arg, ty)| {
                    if premises.peek().is_some_and(|p| p.expr == Expr::Term(arg.clone()) && &p.ty == ty) {
                        premises.next();
                        true
                    } else {
                        ctx.contains(&Annotation::Term(arg.clone(), ty.clone()))
                    }
                }) && premises.next().is_none()
            })
    }

    fn apply(&self, ctx: &HashSet<Annotation>, d: &Derivation, key: &str, args: &[Term]) -> Result<(), String> {
        let Some((arg_types, result)) = self.signature(ctx, key) else {
            return fail(d, "symbol has no signature in the context");
        };
        if result != d.ty || arg_types.len() != args.len() {
            return fail(d, "conclusion does not match the signature");
        }
        let mut premises = d.premises.iter().peekable();
        for (arg, ty) in args.iter().zip(&arg_types) {
            if let Some(p) = premises.peek() {
                if p.expr == Expr::Term(arg.clone()) && &p.ty == ty {
                    self.node(ctx, p)?;
                    premises.next();
                    continue;
                }
            }
            if !ctx.contains(&Annotation::Term(arg.clone(), ty.clone())) {
                return fail(d, &format!("argument {arg} is neither derived nor annotated at {ty}"));
            }
        }
        if premises.next().is_some() {
            return fail(d, "unused premises");
        }
        Ok(())
    }
}

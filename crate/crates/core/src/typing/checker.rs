use crate::elaboration;
use crate::syntax::{Expr, Formula, Term, EQ};
use crate::vocabulary::{equality_key, Signature, Vocabulary, BOOL, CONCEPT, NAT, UNIVERSE};

use super::context::TypingContext;
use super::derivation::{Derivation, Rule};
use super::{TypeError, TypeErrorKind};

/// Computes principal types bottom-up and applies subsumption only where an
/// argument meets its expected type.
#[derive(Debug, Clone, Copy)]
pub struct Checker<'v> {
    vocab: &'v Vocabulary,
}

type TResult<T> = Result<T, TypeError>;

fn member(ctx_entry: &str) -> String {
    format!("{ctx_entry} ∈ ω")
}

impl<'v> Checker<'v> {
    pub fn new(vocab: &'v Vocabulary) -> Self {
        Checker { vocab }
    }

    pub fn principal_type(&self, ctx: &TypingContext, term: &Term) -> TResult<String> {
        Ok(self.term(ctx, term, &mut Vec::new())?.ty)
    }

    /// Derivation of `term` at its principal type.
    pub fn term_derivation(&self, ctx: &TypingContext, term: &Term) -> TResult<Derivation> {
        self.term(ctx, term, &mut Vec::new())
    }

    /// Derivation of `term : expected`, through T-sub when needed.
    pub fn term_at(&self, ctx: &TypingContext, term: &Term, expected: &str) -> TResult<Derivation> {
        let mut path = Vec::new();
        match self.argument(ctx, term, expected, &mut path)? {
            Argument::Premise(d) => Ok(d),
            Argument::Lookup(side) => Ok(Derivation::leaf(Rule::Var, Expr::Term(term.clone()), expected, vec![side])),
        }
    }

    /// Derivation of `formula : Bool`. Implicit guards are elaborated first
    /// under `ctx`; the derivation concludes the elaborated formula.
    pub fn typecheck(&self, ctx: &TypingContext, formula: &Formula) -> TResult<Derivation> {
        let mut ctx = ctx.clone();
        let mut path = Vec::new();
        if formula.has_guards() {
            let elaborated = elaboration::elaborate(self.vocab, &ctx, formula)?;
            return self.formula(&mut ctx, &elaborated, &mut path);
        }
        self.formula(&mut ctx, formula, &mut path)
    }

    fn term(&self, ctx: &TypingContext, term: &Term, path: &mut Vec<usize>) -> TResult<Derivation> {
        if let Some(ty) = ctx.lookup(term) {
            return Ok(Derivation::leaf(Rule::Var, Expr::Term(term.clone()), ty, vec![member(&format!("{term} : {ty}"))]));
        }
        let expr = Expr::Term(term.clone());
        match term {
            Term::Var(_) => Err(TypeError::new(TypeErrorKind::UnboundVariable, path, term)),
            Term::Nat(n) => Ok(Derivation::leaf(Rule::App, expr, NAT, vec![member(&format!("{n} : () -> Nat"))])),
            Term::ConceptRef(s) | Term::Concept(s) => {
                if !self.vocab.is_concept(s) {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, path, term));
                }
                Ok(Derivation::leaf(Rule::App, expr, CONCEPT, vec![member(&format!("{term} : () -> Concept"))]))
            }
            Term::Deref(..) => Err(TypeError::new(TypeErrorKind::IntensionalNotGrounded, path, term)),
            Term::Apply(f, args) => {
                let Some(sig) = ctx.symbol(f) else {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, path, term));
                };
                if sig.is_predicate() {
                    return Err(TypeError::new(TypeErrorKind::PredicateAsTerm, path, term));
                }
                let sig = sig.clone();
                self.application(ctx, f, &sig, args, expr, path)
            }
        }
    }

    fn application(
        &self,
        ctx: &TypingContext,
        key: &str,
        sig: &Signature,
        args: &[Term],
        expr: Expr,
        path: &mut Vec<usize>,
    ) -> TResult<Derivation> {
        if sig.arity() != args.len() {
            return Err(TypeError::mismatch(
                TypeErrorKind::ArityMismatch,
                path,
                &expr,
                &sig.arity().to_string(),
                &args.len().to_string(),
            ));
        }
        let mut sides = vec![member(&format!("{key} : {}", signature_type(sig)))];
        let mut premises = Vec::new();
        for (i, (arg, expected)) in args.iter().zip(&sig.args).enumerate() {
            path.push(i);
            let outcome = self.argument(ctx, arg, expected, path).map_err(|mut e| {
                if e.kind == TypeErrorKind::ArgumentTypeMismatch && e.path == *path {
                    e.expr = expr.to_string();
                }
                e
            });
            path.pop();
            match outcome? {
                Argument::Premise(d) => premises.push(d),
                Argument::Lookup(side) => sides.push(side),
            }
        }
        Ok(Derivation::node(Rule::App, expr, &sig.result, sides, premises))
    }

    fn argument(&self, ctx: &TypingContext, arg: &Term, expected: &str, path: &mut Vec<usize>) -> TResult<Argument> {
        if ctx.lookup(arg) == Some(expected) {
            return Ok(Argument::Lookup(member(&format!("{arg} : {expected}"))));
        }
        if let Term::Concept(s) | Term::ConceptRef(s) = arg {
            if expected != CONCEPT && self.vocab.extension(expected).is_some_and(|m| m.contains(s)) {
                return Ok(Argument::Premise(Derivation::leaf(
                    Rule::App,
                    Expr::Term(arg.clone()),
                    expected,
                    vec![format!("{arg} ∈ {expected}")],
                )));
            }
        }
        let d = self.term(ctx, arg, path)?;
        if d.ty == expected {
            Ok(Argument::Premise(d))
        } else if self.vocab.conforms(&d.ty, expected) {
            let side = format!("{} <: {expected}", d.ty);
            Ok(Argument::Premise(Derivation::node(Rule::Sub, Expr::Term(arg.clone()), expected, vec![side], vec![d])))
        } else {
            Err(TypeError::mismatch(TypeErrorKind::ArgumentTypeMismatch, path, arg, expected, &d.ty))
        }
    }

    fn formula(&self, ctx: &mut TypingContext, f: &Formula, path: &mut Vec<usize>) -> TResult<Derivation> {
        let expr = Expr::Formula(f.clone());
        match f {
            Formula::True => Ok(Derivation::leaf(Rule::True, expr, BOOL, vec![])),
            Formula::False => Ok(Derivation::leaf(Rule::False, expr, BOOL, vec![])),
            Formula::Atom(p, args) if p == EQ => self.equality(ctx, args, expr, path),
            Formula::Atom(p, args) => {
                let Some(sig) = ctx.symbol(p) else {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, path, f));
                };
                if !sig.is_predicate() {
                    return Err(TypeError::mismatch(TypeErrorKind::NonBooleanSubformula, path, f, BOOL, &sig.result));
                }
                let sig = sig.clone();
                self.application(ctx, p, &sig, args, expr, path)
            }
            Formula::DerefAtom(..) => Err(TypeError::new(TypeErrorKind::IntensionalNotGrounded, path, f)),
            Formula::Not(g) => {
                let d = self.child(ctx, g, 0, path)?;
                Ok(Derivation::node(Rule::Neg, expr, BOOL, vec![], vec![d]))
            }
            Formula::Or(a, b) => self.binary(ctx, Rule::Or, a, b, expr, path),
            Formula::Iff(a, b) => self.binary(ctx, Rule::Iff, a, b, expr, path),
            Formula::And(..) => {
                let conjuncts = spine(f);
                let guards = guard_prefix(self.vocab, &conjuncts[..conjuncts.len() - 1]);
                if guards.is_empty() {
                    let Formula::And(a, b) = f else { unreachable!() };
                    return self.binary(ctx, Rule::And, a, b, expr, path);
                }
                let body = drop_conjuncts(f, guards.len());
                self.guarded(ctx, Rule::GuardC, &guards, body, expr, path)
            }
            Formula::Implies(a, b) => {
                let antecedent = spine(a);
                let guards = guard_prefix(self.vocab, &antecedent);
                if guards.len() < antecedent.len() {
                    return self.binary(ctx, Rule::Implies, a, b, expr, path);
                }
                self.guarded(ctx, Rule::GuardI, &guards, b, expr, path)
            }
            Formula::Exists(x, ty, body) | Formula::Forall(x, ty, body) => {
                if !self.vocab.has_type(ty) {
                    return Err(TypeError::new(TypeErrorKind::UnknownSymbol, path, ty));
                }
                let mark = ctx.len();
                ctx.push_var(x, ty);
                let d = self.child(ctx, body, 0, path);
                ctx.truncate(mark);
                let rule = if matches!(f, Formula::Exists(..)) { Rule::Exists } else { Rule::Forall };
                Ok(Derivation::node(rule, expr, BOOL, vec![format!("ω ∪ {{{x} : {ty}}}")], vec![d?]))
            }
            Formula::GuardC(_) | Formula::GuardI(_) => {
                let elaborated = elaboration::elaborate(self.vocab, ctx, f)?;
                self.formula(ctx, &elaborated, path)
            }
        }
    }

    fn child(&self, ctx: &mut TypingContext, f: &Formula, index: usize, path: &mut Vec<usize>) -> TResult<Derivation> {
        path.push(index);
        let d = self.formula(ctx, f, path);
        path.pop();
        d
    }

    fn binary(
        &self,
        ctx: &mut TypingContext,
        rule: Rule,
        a: &Formula,
        b: &Formula,
        expr: Expr,
        path: &mut Vec<usize>,
    ) -> TResult<Derivation> {
        let da = self.child(ctx, a, 0, path)?;
        let db = self.child(ctx, b, 1, path)?;
        Ok(Derivation::node(rule, expr, BOOL, vec![], vec![da, db]))
    }

    /// Equality is checked at the least common supertype of both sides.
    fn equality(&self, ctx: &TypingContext, args: &[Term], expr: Expr, path: &mut Vec<usize>) -> TResult<Derivation> {
        if args.len() != 2 {
            return Err(TypeError::mismatch(TypeErrorKind::ArityMismatch, path, &expr, "2", &args.len().to_string()));
        }
        let mut types = Vec::new();
        for (i, a) in args.iter().enumerate() {
            path.push(i);
            let t = self.term(ctx, a, path);
            path.pop();
            types.push(t?.ty);
        }
        let ty = self.vocab.least_common_supertype(&types[0], &types[1]);
        let key = equality_key(&ty);
        let Some(sig) = ctx.symbol(&key) else {
            return Err(TypeError::new(TypeErrorKind::UnknownSymbol, path, &key));
        };
        let sig = sig.clone();
        self.application(ctx, &key, &sig, args, expr, path)
    }

    /// G-c / G-i: each guarded term is typed at Universe, then the body is
    /// checked with the guard types added to the context.
    fn guarded(
        &self,
        ctx: &mut TypingContext,
        rule: Rule,
        guards: &[(Term, String)],
        body: &Formula,
        expr: Expr,
        path: &mut Vec<usize>,
    ) -> TResult<Derivation> {
        let mut premises = Vec::new();
        let mut principal = Vec::new();
        for (i, (t, _)) in guards.iter().enumerate() {
            let sub = guard_arg_path(rule, i, guards.len());
            path.extend(&sub);
            let d = self.term(ctx, t, path).map_err(|e| match e.kind {
                TypeErrorKind::PredicateAsTerm => TypeError { kind: TypeErrorKind::GuardOnNonUniverseTerm, ..e },
                _ => e,
            });
            path.truncate(path.len() - sub.len());
            let d = d?;
            principal.push(d.ty.clone());
            if d.ty == UNIVERSE {
                premises.push(d);
            } else if self.vocab.conforms(&d.ty, UNIVERSE) {
                let side = format!("{} <: {UNIVERSE}", d.ty);
                premises.push(Derivation::node(Rule::Sub, Expr::Term(t.clone()), UNIVERSE, vec![side], vec![d]));
            } else {
                return Err(TypeError::mismatch(TypeErrorKind::GuardOnNonUniverseTerm, path, t, UNIVERSE, &d.ty));
            }
        }
        let mark = ctx.len();
        let mut sides = Vec::new();
        for ((t, ty), found) in guards.iter().zip(&principal) {
            if !self.vocab.conforms(found, ty) {
                ctx.push_term(t.clone(), ty);
                sides.push(format!("ω ∪ {{{t} : {ty}}}"));
            }
        }
        path.extend(body_path(rule, guards.len()));
        let d = self.formula(ctx, body, path);
        path.truncate(path.len() - body_path(rule, guards.len()).len());
        ctx.truncate(mark);
        premises.push(d?);
        Ok(Derivation::node(rule, expr, BOOL, sides, premises))
    }
}

enum Argument {
    Premise(Derivation),
    /// The argument's type was read directly off the context.
    Lookup(String),
}

fn signature_type(sig: &Signature) -> String {
    let text = sig.to_string();
    text.split_once(" : ").map(|(_, t)| t.to_string()).unwrap_or(text)
}

/// Conjuncts along the right spine of nested `&`.
pub(crate) fn spine(f: &Formula) -> Vec<&Formula> {
    let mut out = Vec::new();
    let mut node = f;
    while let Formula::And(a, b) = node {
        out.push(&**a);
        node = b;
    }
    out.push(node);
    out
}

/// The leading run of type-predicate atoms `T(t)`.
pub(crate) fn guard_prefix(vocab: &Vocabulary, items: &[&Formula]) -> Vec<(Term, String)> {
    items
        .iter()
        .map_while(|f| match f {
            Formula::Atom(ty, args) if args.len() == 1 && vocab.has_type(ty) => Some((args[0].clone(), ty.clone())),
            _ => None,
        })
        .collect()
}

fn drop_conjuncts(f: &Formula, n: usize) -> &Formula {
    let mut node = f;
    for _ in 0..n {
        let Formula::And(_, b) = node else { break };
        node = b;
    }
    node
}

/// Path from a guarded formula to the argument of its `i`-th guard atom.
fn guard_arg_path(rule: Rule, i: usize, n: usize) -> Vec<usize> {
    let mut p = if rule == Rule::GuardI { vec![0] } else { Vec::new() };
    p.extend(std::iter::repeat(1).take(i));
    if rule == Rule::GuardC || i + 1 < n {
        p.push(0);
    }
    p.push(0);
    p
}

fn body_path(rule: Rule, n: usize) -> Vec<usize> {
    if rule == Rule::GuardI {
        vec![1]
    } else {
        vec![1; n]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_formula, parse_theory};
    use crate::typing::initial_context;

    const DECLS: &str = "
type Animal
type Cat <: Animal
type Dog <: Animal
func age: Animal -> Nat
const tom: Cat
pred bark: Dog
pred meow: Cat
pred makingSound: Animal
";

    fn setup() -> (Vocabulary, TypingContext) {
        let v = parse_theory(DECLS).unwrap().vocabulary;
        let ctx = initial_context(&v);
        (v, ctx)
    }

    fn check(src: &str) -> TResult<Derivation> {
        let (v, ctx) = setup();
        let f = parse_formula(src, &v, &[]).unwrap();
        Checker::new(&v).typecheck(&ctx, &f)
    }

    #[test]
    fn guarded_existential_derivation() {
        let d = check("?a[Animal]: Cat(a) & meow(a)").unwrap();
        assert_eq!(d.rule, Rule::Exists);
        let gc = &d.premises[0];
        assert_eq!(gc.rule, Rule::GuardC);
        assert_eq!(gc.premises.len(), 2);
        assert_eq!(gc.premises[0].rule, Rule::Sub);
        assert_eq!(gc.premises[0].premises[0].rule, Rule::Var);
        assert_eq!(gc.premises[0].ty, "Universe");
        assert_eq!(gc.premises[1].rule, Rule::App);
        assert!(gc.premises[1].premises.is_empty());
        assert_eq!(gc.premises[1].side_conditions, vec!["meow : Cat -> Bool ∈ ω", "a : Cat ∈ ω"]);
    }

    #[test]
    fn principal_types() {
        let (v, ctx) = setup();
        let c = Checker::new(&v);
        let age = parse_formula("age(tom) = 1", &v, &[]).unwrap();
        let Formula::Atom(_, args) = &age else { panic!() };
        let d = c.term_derivation(&ctx, &args[0]).unwrap();
        assert_eq!(d.ty, "Nat");
        assert_eq!(d.premises[0].rule, Rule::Sub);
        assert_eq!(d.premises[0].side_conditions, vec!["Cat <: Animal"]);
        assert_eq!(c.principal_type(&ctx, &Term::ConceptRef("meow".into())).unwrap(), "Concept");
        let mut refined = ctx.clone().with_var("a", "Animal");
        refined.push_term(Term::var("a"), "Cat");
        assert_eq!(c.principal_type(&refined, &Term::var("a")).unwrap(), "Cat");
    }

    #[test]
    fn ill_typed_atoms() {
        let e = check("bark(tom)").unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::ArgumentTypeMismatch);
        assert_eq!((e.expected.as_deref(), e.found.as_deref()), (Some("Dog"), Some("Cat")));
        assert_eq!(e.path, vec![0]);
        assert!(e.to_string().contains("expected Dog, found Cat"));

        let e = check("?a[Animal]: meow(a)").unwrap_err();
        assert_eq!((e.expected.as_deref(), e.found.as_deref()), (Some("Cat"), Some("Animal")));
        assert_eq!(e.path, vec![0, 0]);
        assert_eq!(check("?a[Animal]: age(a)").unwrap_err().kind, TypeErrorKind::NonBooleanSubformula);
        assert_eq!(check("meow($(`tom)())").unwrap_err().kind, TypeErrorKind::IntensionalNotGrounded);
        assert_eq!(check("Cat(meow(tom)) & meow(tom)").unwrap_err().kind, TypeErrorKind::GuardOnNonUniverseTerm);
    }

    #[test]
    fn connectives_and_guards() {
        let d = check("true | false").unwrap();
        assert_eq!(d.rules(), vec![Rule::Or, Rule::True, Rule::False]);
        let d = check("!a[Animal]: (Cat(a) => meow(a)) & (Dog(a) => bark(a))").unwrap();
        assert_eq!(d.rules().iter().filter(|r| **r == Rule::GuardI).count(), 2);
        let d = check("!a[Animal]: makingSound(a) <=> (Cat(a) & meow(a)) | (Dog(a) & bark(a))").unwrap();
        assert_eq!(d.rules().iter().filter(|r| **r == Rule::GuardC).count(), 2);
        assert!(check("?a[Animal]: Animal(a) & Cat(a) & meow(a)").is_ok());
        assert!(check("Animal(tom) & meow(tom)").is_ok());
        assert!(check("?a[Animal]: Cat(a) & Dog(a) & meow(a)").is_err());
    }

    #[test]
    fn equality_at_least_common_supertype() {
        let d = check("?c[Cat]: ?d[Dog]: c = d").unwrap();
        let eq = &d.premises[0].premises[0];
        assert_eq!(eq.side_conditions[0], "=_Animal : Animal * Animal -> Bool ∈ ω");
        assert_eq!(eq.premises.len(), 2);
        assert!(check("age(tom) + 1 = 2 * 3").is_ok());
    }

    #[test]
    fn nested_rebinding_blocks_refinement() {
        assert!(check("?a[Animal]: Cat(a) & (?a[Animal]: meow(a))").is_err());
        assert!(check("?a[Animal]: Cat(a) & (?b[Dog]: meow(a))").is_ok());
    }
}

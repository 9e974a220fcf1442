//! Elimination of intensional constructs. Concept-typed quantifiers are
//! expanded over their fixed extensions, references become concept objects,
//! and dereferences become ordinary applications.

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::elaboration;
use crate::span::Span;
use crate::syntax::{Formula, Term, Theory};
use crate::typing::{TypeError, TypingContext};
use crate::vocabulary::{SymbolKind, Vocabulary, CONCEPT};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum GroundingErrorKind {
    NonTotalConceptFunction,
    NonFunctionalFacts,
    UnknownConceptMember,
    UnresolvableDeref,
    MissingExtension,
    GroundArityError,
    DerefKindMismatch,
    /// Elaborating a wrapper after grounding failed.
    Typing(TypeError),
}

impl GroundingErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            GroundingErrorKind::NonTotalConceptFunction => "NonTotalConceptFunction",
            GroundingErrorKind::NonFunctionalFacts => "NonFunctionalFacts",
            GroundingErrorKind::UnknownConceptMember => "UnknownConceptMember",
            GroundingErrorKind::UnresolvableDeref => "UnresolvableDeref",
            GroundingErrorKind::MissingExtension => "MissingExtension",
            GroundingErrorKind::GroundArityError => "GroundArityError",
            GroundingErrorKind::DerefKindMismatch => "DerefKindMismatch",
            GroundingErrorKind::Typing(e) => e.kind.name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{message}")]
pub struct GroundingError {
    pub kind: GroundingErrorKind,
    pub message: String,
    pub span: Option<Span>,
}

impl GroundingError {
    fn new(kind: GroundingErrorKind, message: impl Into<String>) -> Self {
        GroundingError { kind, message: message.into(), span: None }
    }

    fn at(mut self, span: Span) -> Self {
        self.span = Some(span);
        self
    }
}

impl From<TypeError> for GroundingError {
    fn from(e: TypeError) -> Self {
        GroundingError::new(GroundingErrorKind::Typing(e.clone()), e.to_string())
    }
}

type GResult<T> = Result<T, GroundingError>;

/// The fixed part of every structure: extensions of concept types and the
/// graphs of concept-valued functions.
#[derive(Debug, Clone)]
pub struct GroundInterpretation {
    vocab: Vocabulary,
    pub extensions: IndexMap<String, Vec<String>>,
    pub facts: IndexMap<(String, Vec<String>), String>,
}

impl GroundInterpretation {
    pub fn vocabulary(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn extension(&self, ty: &str) -> Option<&[String]> {
        self.extensions.get(ty).map(Vec::as_slice)
    }

    pub fn fact(&self, function: &str, args: &[String]) -> Option<&str> {
        self.facts.get(&(function.to_string(), args.to_vec())).map(String::as_str)
    }

    /// Whether `function` has a fixed graph.
    pub fn is_fixed(&self, function: &str) -> bool {
        self.facts.keys().any(|(f, _)| f == function)
    }
}

/// Collect extensions and `define` facts, checking that each defined
/// function is functional and total over its argument extensions.
pub fn build_intensional_interp(theory: &Theory) -> GResult<GroundInterpretation> {
    let vocab = &theory.vocabulary;
    let mut extensions = IndexMap::new();
    for t in vocab.types() {
        if t.name == CONCEPT {
            extensions.insert(t.name.clone(), vocab.concept_universe());
        } else if let Some(members) = vocab.extension(&t.name) {
            extensions.insert(t.name.clone(), members.to_vec());
        }
    }
    let mut facts: IndexMap<(String, Vec<String>), String> = IndexMap::new();
    for fact in &theory.concept_facts {
        let sig = vocab.signature(&fact.function).ok_or_else(|| {
            GroundingError::new(GroundingErrorKind::UnknownConceptMember, format!("unknown function `{}`", fact.function))
                .at(fact.span)
        })?;
        let slots = sig.args.iter().zip(&fact.args).chain(std::iter::once((&sig.result, &fact.value)));
        for (ty, member) in slots {
            if !extensions.get(ty).is_some_and(|m| m.contains(member)) {
                return Err(GroundingError::new(
                    GroundingErrorKind::UnknownConceptMember,
                    format!("`{member} is not a member of {ty}"),
                )
                .at(fact.span));
            }
        }
        let key = (fact.function.clone(), fact.args.clone());
        match facts.get(&key) {
            Some(v) if *v != fact.value => {
                return Err(GroundingError::new(
                    GroundingErrorKind::NonFunctionalFacts,
                    format!("{}({}) is defined as both `{v} and `{}", fact.function, backticked(&fact.args), fact.value),
                )
                .at(fact.span));
            }
            _ => {
                facts.insert(key, fact.value.clone());
            }
        }
    }
    let interp = GroundInterpretation { vocab: vocab.clone(), extensions, facts };
    let defined: Vec<String> = {
        let mut seen: Vec<String> = Vec::new();
        for (f, _) in interp.facts.keys() {
            if !seen.contains(f) {
                seen.push(f.clone());
            }
        }
        seen
    };
    for f in defined {
        let sig = vocab.signature(&f).expect("checked above");
        for tuple in product(sig.args.iter().map(|t| interp.extension(t).unwrap_or(&[]))) {
            if interp.fact(&f, &tuple).is_none() {
                let span = theory.concept_facts.iter().find(|c| c.function == f).map(|c| c.span);
                let mut e = GroundingError::new(
                    GroundingErrorKind::NonTotalConceptFunction,
                    format!("{f} has no value for ({})", backticked(&tuple)),
                );
                e.span = span;
                return Err(e);
            }
        }
    }
    Ok(interp)
}

fn backticked(items: &[String]) -> String {
    items.iter().map(|s| format!("`{s}")).collect::<Vec<_>>().join(", ")
}

/// Cartesian product in lexicographic order, first slot most significant.
pub(crate) fn product<'a, T: Clone + 'a>(slots: impl Iterator<Item = &'a [T]>) -> Vec<Vec<T>> {
    let mut out: Vec<Vec<T>> = vec![Vec::new()];
    for slot in slots {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                slot.iter().map(move |x| {
                    let mut next = prefix.clone();
                    next.push(x.clone());
                    next
                })
            })
            .collect();
    }
    out
}

/// The stages of grounding one formula.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundTrace {
    pub source: Formula,
    /// Concept quantifiers expanded and references replaced by objects.
    pub expanded: Formula,
    /// Dereferences eliminated; guard wrappers still in place.
    pub reduced: Formula,
    pub grounded: Formula,
}

pub fn ground(formula: &Formula, interp: &GroundInterpretation) -> GResult<Formula> {
    Ok(ground_traced(formula, interp)?.grounded)
}

/// Ground a formula whose free variables are typed by `ctx`.
pub fn ground_in(ctx: &TypingContext, formula: &Formula, interp: &GroundInterpretation) -> GResult<Formula> {
    Ok(trace_in(ctx, formula, interp)?.grounded)
}

pub fn ground_traced(formula: &Formula, interp: &GroundInterpretation) -> GResult<GroundTrace> {
    trace_in(&TypingContext::initial(interp.vocabulary()), formula, interp)
}

fn trace_in(ctx: &TypingContext, formula: &Formula, interp: &GroundInterpretation) -> GResult<GroundTrace> {
    let g = Grounder { interp };
    let expanded = g.expand(formula)?;
    let reduced = g.reduce(&expanded)?;
    let grounded = elaboration::elaborate(interp.vocabulary(), ctx, &reduced)?;
    Ok(GroundTrace { source: formula.clone(), expanded, reduced, grounded })
}

/// Atom count of the grounded formula.
pub fn grounded_size(formula: &Formula, interp: &GroundInterpretation) -> GResult<usize> {
    Ok(ground(formula, interp)?.atom_count())
}

struct Grounder<'a> {
    interp: &'a GroundInterpretation,
}

impl Grounder<'_> {
    fn vocab(&self) -> &Vocabulary {
        self.interp.vocabulary()
    }

    fn expand(&self, f: &Formula) -> GResult<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(objects).collect()),
            Formula::DerefAtom(h, args) => Formula::DerefAtom(objects(h), args.iter().map(objects).collect()),
            Formula::Not(g) => Formula::not(self.expand(g)?),
            Formula::GuardC(g) => Formula::GuardC(Box::new(self.expand(g)?)),
            Formula::GuardI(g) => Formula::GuardI(Box::new(self.expand(g)?)),
            Formula::Or(a, b) => Formula::or(self.expand(a)?, self.expand(b)?),
            Formula::And(a, b) => Formula::and(self.expand(a)?, self.expand(b)?),
            Formula::Implies(a, b) => Formula::implies(self.expand(a)?, self.expand(b)?),
            Formula::Iff(a, b) => Formula::iff(self.expand(a)?, self.expand(b)?),
            Formula::Exists(x, t, body) | Formula::Forall(x, t, body) => {
                let exists = matches!(f, Formula::Exists(..));
                if !self.vocab().is_concept_type(t) {
                    let body = self.expand(body)?;
                    return Ok(if exists { Formula::exists(x, t, body) } else { Formula::forall(x, t, body) });
                }
                let members = self.interp.extension(t).ok_or_else(|| {
                    GroundingError::new(GroundingErrorKind::MissingExtension, format!("concept type {t} has no extension"))
                })?;
                let instances = members
                    .iter()
                    .map(|m| self.expand(&body.substitute(x, &Term::Concept(m.clone()))))
                    .collect::<GResult<Vec<_>>>()?;
                if exists {
                    Formula::disjunction(instances)
                } else {
                    Formula::conjunction(instances)
                }
            }
        })
    }

    fn reduce(&self, f: &Formula) -> GResult<Formula> {
        Ok(match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), self.terms(args)?),
            Formula::DerefAtom(h, args) => {
                let s = self.head(h)?;
                let args = self.terms(args)?;
                match self.vocab().symbol_kind(&s) {
                    Some(SymbolKind::TypePredicate) => {}
                    Some(SymbolKind::User) if self.vocab().signature(&s).is_some_and(|g| g.is_predicate()) => {}
                    _ => {
                        return Err(GroundingError::new(
                            GroundingErrorKind::DerefKindMismatch,
                            format!("`{s}` is not a predicate but is dereferenced as a formula"),
                        ))
                    }
                }
                self.arity(&s, &args)?;
                Formula::Atom(s, args)
            }
            Formula::Not(g) => Formula::not(self.reduce(g)?),
            Formula::GuardC(g) => Formula::GuardC(Box::new(self.reduce(g)?)),
            Formula::GuardI(g) => Formula::GuardI(Box::new(self.reduce(g)?)),
            Formula::Or(a, b) => Formula::or(self.reduce(a)?, self.reduce(b)?),
            Formula::And(a, b) => Formula::and(self.reduce(a)?, self.reduce(b)?),
            Formula::Implies(a, b) => Formula::implies(self.reduce(a)?, self.reduce(b)?),
            Formula::Iff(a, b) => Formula::iff(self.reduce(a)?, self.reduce(b)?),
            Formula::Exists(x, t, body) => Formula::exists(x, t, self.reduce(body)?),
            Formula::Forall(x, t, body) => Formula::forall(x, t, self.reduce(body)?),
        })
    }

    fn terms(&self, ts: &[Term]) -> GResult<Vec<Term>> {
        ts.iter().map(|t| self.term(t)).collect()
    }

    fn term(&self, t: &Term) -> GResult<Term> {
        Ok(match t {
            Term::Var(_) | Term::Nat(_) | Term::Concept(_) => t.clone(),
            Term::ConceptRef(s) => Term::Concept(s.clone()),
            Term::Apply(f, args) => Term::Apply(f.clone(), self.terms(args)?),
            Term::Deref(h, args) => {
                let s = self.head(h)?;
                let args = self.terms(args)?;
                let is_function = self.vocab().symbol_kind(&s) == Some(SymbolKind::User)
                    && self.vocab().signature(&s).is_some_and(|g| !g.is_predicate());
                if !is_function {
                    return Err(GroundingError::new(
                        GroundingErrorKind::DerefKindMismatch,
                        format!("`{s}` is not a function but is dereferenced as a term"),
                    ));
                }
                self.arity(&s, &args)?;
                Term::Apply(s, args)
            }
        })
    }

    fn arity(&self, s: &str, args: &[Term]) -> GResult<()> {
        let expected = self.vocab().signature(s).map_or(0, |g| g.arity());
        if expected != args.len() {
            return Err(GroundingError::new(
                GroundingErrorKind::GroundArityError,
                format!("`{s}` takes {expected} arguments but is dereferenced with {}", args.len()),
            ));
        }
        Ok(())
    }

    /// Reduce a dereference head to the name of a symbol.
    fn head(&self, h: &Term) -> GResult<String> {
        match h {
            Term::Concept(s) | Term::ConceptRef(s) => Ok(s.clone()),
            Term::Apply(f, args) if self.interp.is_fixed(f) => {
                let args = args.iter().map(|a| self.head(a)).collect::<GResult<Vec<_>>>()?;
                self.interp.fact(f, &args).map(str::to_string).ok_or_else(|| {
                    GroundingError::new(
                        GroundingErrorKind::UnresolvableDeref,
                        format!("{f}({}) has no defined value", backticked(&args)),
                    )
                })
            }
            _ => Err(GroundingError::new(
                GroundingErrorKind::UnresolvableDeref,
                format!("`{h}` does not reduce to a concept"),
            )),
        }
    }
}

fn objects(t: &Term) -> Term {
    match t {
        Term::ConceptRef(s) => Term::Concept(s.clone()),
        Term::Apply(f, args) => Term::Apply(f.clone(), args.iter().map(objects).collect()),
        Term::Deref(h, args) => Term::Deref(Box::new(objects(h)), args.iter().map(objects).collect()),
        _ => t.clone(),
    }
}

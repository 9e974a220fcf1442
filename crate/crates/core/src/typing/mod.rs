//! The typing relation: principal types of terms, derivations for formulas,
//! guard rules, and sentence checking through grounding.

pub(crate) mod checker;
mod context;
mod derivation;
mod validator;

use serde::Serialize;
use thiserror::Error;

use crate::grounding::{self, GroundInterpretation, GroundTrace, GroundingError, GroundingErrorKind};
use crate::syntax::{Formula, Term, Theory};
use crate::vocabulary::Vocabulary;

pub use checker::Checker;
pub use context::{Entry, TypingContext};
pub use derivation::{Derivation, Rule};
pub use validator::validate_derivation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TypeErrorKind {
    ArgumentTypeMismatch,
    UnknownSymbol,
    UnboundVariable,
    NonBooleanSubformula,
    GuardOnNonUniverseTerm,
    IntensionalNotGrounded,
    PredicateAsTerm,
    IncomparableTypes,
    ArityMismatch,
}

impl TypeErrorKind {
    pub fn name(self) -> &'static str {
        match self {
            TypeErrorKind::ArgumentTypeMismatch => "ArgumentTypeMismatch",
            TypeErrorKind::UnknownSymbol => "UnknownSymbol",
            TypeErrorKind::UnboundVariable => "UnboundVariable",
            TypeErrorKind::NonBooleanSubformula => "NonBooleanSubformula",
            TypeErrorKind::GuardOnNonUniverseTerm => "GuardOnNonUniverseTerm",
            TypeErrorKind::IntensionalNotGrounded => "IntensionalNotGrounded",
            TypeErrorKind::PredicateAsTerm => "PredicateAsTerm",
            TypeErrorKind::IncomparableTypes => "IncomparableTypes",
            TypeErrorKind::ArityMismatch => "ArityMismatch",
        }
    }
}

/// A typing failure. `path` lists child indices from the checked formula
/// down to `expr`; `expected`/`found` are set for type mismatches.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{}", self.describe())]
pub struct TypeError {
    pub kind: TypeErrorKind,
    pub path: Vec<usize>,
    pub expr: String,
    pub expected: Option<String>,
    pub found: Option<String>,
}

impl TypeError {
    pub fn new(kind: TypeErrorKind, path: &[usize], expr: impl ToString) -> Self {
        TypeError { kind, path: path.to_vec(), expr: expr.to_string(), expected: None, found: None }
    }

    pub fn mismatch(kind: TypeErrorKind, path: &[usize], expr: impl ToString, expected: &str, found: &str) -> Self {
        TypeError {
            kind,
            path: path.to_vec(),
            expr: expr.to_string(),
            expected: Some(expected.to_string()),
            found: Some(found.to_string()),
        }
    }

    fn describe(&self) -> String {
        let e = &self.expr;
        let types = || {
            format!("expected {}, found {}", self.expected.as_deref().unwrap_or("?"), self.found.as_deref().unwrap_or("?"))
        };
        match self.kind {
            TypeErrorKind::ArgumentTypeMismatch => format!("{} at `{e}`", types()),
            TypeErrorKind::IncomparableTypes => format!("{} at `{e}`; the types are unrelated", types()),
            TypeErrorKind::NonBooleanSubformula => format!("{} at `{e}`, which is used as a formula", types()),
            TypeErrorKind::ArityMismatch => format!("expected {} arguments, found {} at `{e}`",
                self.expected.as_deref().unwrap_or("?"), self.found.as_deref().unwrap_or("?")),
            TypeErrorKind::UnknownSymbol => format!("unknown symbol or type in `{e}`"),
            TypeErrorKind::UnboundVariable => format!("variable `{e}` is not bound"),
            TypeErrorKind::GuardOnNonUniverseTerm => format!("guard argument `{e}` is not a term of a type below Universe"),
            TypeErrorKind::IntensionalNotGrounded => format!("`{e}` must be grounded before it can be typed"),
            TypeErrorKind::PredicateAsTerm => format!("predicate application `{e}` used as a term"),
        }
    }
}

/// The verdict for one sentence. Intensional sentences carry the grounding
/// steps that produced the formula actually checked.
#[derive(Debug, Clone)]
pub struct SentenceCheck {
    pub grounding: Option<GroundTrace>,
    pub result: Result<Derivation, TypeError>,
}

impl SentenceCheck {
    pub fn is_well_typed(&self) -> bool {
        self.result.is_ok()
    }
}

pub fn initial_context(vocab: &Vocabulary) -> TypingContext {
    TypingContext::initial(vocab)
}

pub fn principal_type(vocab: &Vocabulary, ctx: &TypingContext, term: &Term) -> Result<String, TypeError> {
    Checker::new(vocab).principal_type(ctx, term)
}

pub fn typecheck(vocab: &Vocabulary, ctx: &TypingContext, formula: &Formula) -> Result<Derivation, TypeError> {
    Checker::new(vocab).typecheck(ctx, formula)
}

/// Check a sentence of `theory`. Intensional sentences are grounded first
/// and well-typed exactly when their grounded form is.
pub fn check_sentence(theory: &Theory, sentence: &Formula) -> Result<SentenceCheck, GroundingError> {
    if sentence.is_intensional() {
        let interp = grounding::build_intensional_interp(theory)?;
        check_sentence_with(&interp, sentence)
    } else {
        let ctx = initial_context(&theory.vocabulary);
        Ok(SentenceCheck { grounding: None, result: typecheck(&theory.vocabulary, &ctx, sentence) })
    }
}

pub fn check_sentence_with(interp: &GroundInterpretation, sentence: &Formula) -> Result<SentenceCheck, GroundingError> {
    let vocab = interp.vocabulary();
    let ctx = initial_context(vocab);
    if !sentence.is_intensional() {
        return Ok(SentenceCheck { grounding: None, result: typecheck(vocab, &ctx, sentence) });
    }
    match grounding::ground_traced(sentence, interp) {
        Ok(trace) => {
            let result = typecheck(vocab, &ctx, &trace.grounded);
            Ok(SentenceCheck { grounding: Some(trace), result })
        }
        Err(GroundingError { kind: GroundingErrorKind::Typing(e), .. }) => {
            Ok(SentenceCheck { grounding: None, result: Err(e) })
        }
        Err(e) => Err(e),
    }
}

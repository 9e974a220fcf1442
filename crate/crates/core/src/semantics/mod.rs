//! Finite structures, the value of expressions in a structure, satisfaction
//! and a brute-force model finder.

mod eval;
mod models;
mod text;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::grounding::GroundingError;
use crate::syntax::ConceptFact;
use crate::typing::TypeError;

pub use eval::{eval, satisfies, Assignment, Model};
pub use models::{count_candidates, find_models, ModelError, ModelOptions, DEFAULT_MAX_CANDIDATES};
pub use text::{parse_structure, print_structure, StructureParseError};
pub use validate::{validate_structure, StructureReport, StructureViolation, ViolationKind};

/// An element of some type's carrier. The derived order (truth values,
/// numbers, concepts, then plain identifiers) is the canonical order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DomainElement {
    Bool(bool),
    Nat(u64),
    /// `@s`, the concept of symbol `s`.
    Concept(String),
    Plain(String),
}

impl DomainElement {
    pub fn plain(name: &str) -> Self {
        DomainElement::Plain(name.to_string())
    }

    pub fn concept(name: &str) -> Self {
        DomainElement::Concept(name.to_string())
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            DomainElement::Bool(b) => Some(*b),
            _ => None,
        }
    }
}

impl fmt::Display for DomainElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainElement::Bool(b) => write!(f, "{b}"),
            DomainElement::Nat(n) => write!(f, "{n}"),
            DomainElement::Concept(s) => write!(f, "@{s}"),
            DomainElement::Plain(s) => f.write_str(s),
        }
    }
}

/// Rows `(arguments, result)` of a symbol's interpretation. For predicates,
/// rows absent from the graph are false.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FunctionGraph {
    pub rows: BTreeSet<(Vec<DomainElement>, DomainElement)>,
}

impl FunctionGraph {
    pub fn new() -> Self {
        FunctionGraph::default()
    }

    pub fn insert(&mut self, args: Vec<DomainElement>, result: DomainElement) {
        self.rows.insert((args, result));
    }

    /// The first result listed for `args`.
    pub fn get(&self, args: &[DomainElement]) -> Option<&DomainElement> {
        self.rows.iter().find(|(a, _)| a == args).map(|(_, r)| r)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// The user-supplied part of a structure. Built-in types, concept types
/// with declared extensions, type predicates, equality and arithmetic are
/// synthesized when the structure is used.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Structure {
    pub types: BTreeMap<String, BTreeSet<DomainElement>>,
    pub interps: BTreeMap<String, FunctionGraph>,
    /// Graphs fixed by the theory's `define` facts; never printed.
    pub fixed: BTreeMap<String, FunctionGraph>,
    /// Upper end of the `Nat` range that quantifiers and totality checks
    /// range over.
    pub nat_bound: Option<u64>,
}

impl Structure {
    pub fn new() -> Self {
        Structure::default()
    }

    pub fn set_type(&mut self, name: &str, elements: impl IntoIterator<Item = DomainElement>) {
        self.types.insert(name.to_string(), elements.into_iter().collect());
    }

    pub fn set_interp(&mut self, name: &str, graph: FunctionGraph) {
        self.interps.insert(name.to_string(), graph);
    }

    /// Interpret a predicate by the tuples it holds for.
    pub fn set_predicate(&mut self, name: &str, holds: impl IntoIterator<Item = Vec<DomainElement>>) {
        let mut g = FunctionGraph::new();
        for args in holds {
            g.insert(args, DomainElement::Bool(true));
        }
        self.interps.insert(name.to_string(), g);
    }

    /// Interpret a zero-ary function.
    pub fn set_constant(&mut self, name: &str, value: DomainElement) {
        let mut g = FunctionGraph::new();
        g.insert(Vec::new(), value);
        self.interps.insert(name.to_string(), g);
    }

    /// Record the graphs of concept-valued functions fixed by `facts`.
    pub fn adopt_facts(&mut self, facts: &[ConceptFact]) {
        for fact in facts {
            let args = fact.args.iter().map(|a| DomainElement::concept(a)).collect();
            self.fixed
                .entry(fact.function.clone())
                .or_default()
                .insert(args, DomainElement::concept(&fact.value));
        }
    }

    /// User interpretation of `name`, falling back to fixed graphs.
    pub fn graph(&self, name: &str) -> Option<&FunctionGraph> {
        self.interps.get(name).or_else(|| self.fixed.get(name))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum EvalError {
    #[error("`{symbol}` cannot be applied to ({args}) through a dereference")]
    RuntimeDerefMismatch { symbol: String, args: String },
    #[error("quantifying over `{0}` needs a Nat bound")]
    UnboundedNatQuantifier(String),
    #[error("variable `{0}` has no value")]
    UnassignedVariable(String),
    #[error("`{symbol}` has no value for ({args})")]
    UndefinedApplication { symbol: String, args: String },
    #[error("the sentence is not well-typed: {0}")]
    IllTypedSentence(String),
    #[error("invalid structure: {0}")]
    InvalidStructure(String),
}

impl EvalError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EvalError::RuntimeDerefMismatch { .. } => "RuntimeDerefMismatch",
            EvalError::UnboundedNatQuantifier(_) => "UnboundedNatQuantifier",
            EvalError::UnassignedVariable(_) => "UnassignedVariable",
            EvalError::UndefinedApplication { .. } => "UndefinedApplication",
            EvalError::IllTypedSentence(_) => "IllTypedSentence",
            EvalError::InvalidStructure(_) => "InvalidStructure",
        }
    }
}

impl From<TypeError> for EvalError {
    fn from(e: TypeError) -> Self {
        EvalError::IllTypedSentence(e.to_string())
    }
}

impl From<GroundingError> for EvalError {
    fn from(e: GroundingError) -> Self {
        EvalError::IllTypedSentence(e.to_string())
    }
}

pub(crate) fn join_elements(items: &[DomainElement]) -> String {
    items.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

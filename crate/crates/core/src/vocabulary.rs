//! Vocabularies: type symbols, the subtype DAG, symbol signatures and the
//! symbols every vocabulary carries implicitly (type predicates, per-type
//! equality and natural-number arithmetic).
//!
//! Types and symbols share one namespace. The type predicate of a type `T`
//! is registered under the name `T` itself; whether `T` denotes the type or
//! its predicate is decided by where the name occurs.

use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::IndexMap;
use serde::Serialize;
use thiserror::Error;

use crate::span::Span;

pub const UNIVERSE: &str = "Universe";
pub const BOOL: &str = "Bool";
pub const NAT: &str = "Nat";
pub const CONCEPT: &str = "Concept";

/// Names of the built-in arithmetic functions over `Nat`.
pub const ARITHMETIC: [&str; 3] = ["+", "-", "*"];

/// Symbol name of the equality instance at type `ty`.
pub fn equality_key(ty: &str) -> String {
    format!("=_{ty}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Builtin {
    Universe,
    Bool,
    Nat,
    Concept,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Universe, Builtin::Bool, Builtin::Nat, Builtin::Concept];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Universe => UNIVERSE,
            Builtin::Bool => BOOL,
            Builtin::Nat => NAT,
            Builtin::Concept => CONCEPT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TypeSymbol {
    pub name: String,
    pub builtin: Option<Builtin>,
}

/// `name : args -> result`. A signature whose result is `Bool` is a predicate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub name: String,
    pub args: Vec<String>,
    pub result: String,
}

impl Signature {
    pub fn new(name: impl Into<String>, args: Vec<String>, result: impl Into<String>) -> Self {
        Signature { name: name.into(), args, result: result.into() }
    }

    pub fn is_predicate(&self) -> bool {
        self.result == BOOL
    }

    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} : ", self.name)?;
        if self.args.is_empty() {
            write!(f, "()")?;
        } else {
            write!(f, "{}", self.args.join(" * "))?;
        }
        write!(f, " -> {}", self.result)
    }
}

/// The fixed member list of a concept type, written `type K <: Concept := {...}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConceptExtension {
    pub type_name: String,
    pub members: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SymbolKind {
    User,
    TypePredicate,
    Equality,
    Arithmetic,
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum VocabError {
    #[error("type {0} is already declared")]
    DuplicateType(String),
    #[error("symbol {0} is already declared")]
    DuplicateSymbol(String),
    #[error("unknown supertype {supertype} of {name}")]
    UnknownSupertype { name: String, supertype: String },
    #[error("unknown type {0}")]
    UnknownType(String),
    #[error("subtype declaration {0} <: {1} closes a cycle")]
    CyclicSubtyping(String, String),
    #[error("type {0} declares an extension but is not a subtype of Concept")]
    ExtensionOnNonConceptType(String),
    #[error("extension of {type_name} names {member}, which is neither a declared symbol nor a type")]
    UnknownExtensionMember { type_name: String, member: String },
    #[error("extension of {sub} contains {member}, which is missing from the extension of its supertype {sup}")]
    ExtensionNotContained { sub: String, sup: String, member: String },
    #[error("type {0} has no type predicate registered")]
    MissingTypePredicate(String),
}

impl VocabError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            VocabError::DuplicateType(_) => "DuplicateType",
            VocabError::DuplicateSymbol(_) => "DuplicateSymbol",
            VocabError::UnknownSupertype { .. } => "UnknownSupertype",
            VocabError::UnknownType(_) => "UnknownType",
            VocabError::CyclicSubtyping(..) => "CyclicSubtyping",
            VocabError::ExtensionOnNonConceptType(_) => "ExtensionOnNonConceptType",
            VocabError::UnknownExtensionMember { .. } => "UnknownExtensionMember",
            VocabError::ExtensionNotContained { .. } => "ExtensionNotContained",
            VocabError::MissingTypePredicate(_) => "MissingTypePredicate",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub error: VocabError,
    pub location: Option<Span>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: &str) -> bool {
        self.violations.iter().any(|v| v.error.kind_name() == kind)
    }

    fn push(&mut self, error: VocabError, location: Option<Span>) {
        self.violations.push(Violation { error, location });
    }
}

/// One raw declaration, as read from a theory file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Declaration {
    Type { name: String, supertypes: Vec<String>, extension: Option<Vec<String>>, span: Option<Span> },
    Symbol { name: String, args: Vec<String>, result: String, span: Option<Span> },
}

#[derive(Debug, Clone)]
struct TypeEntry {
    symbol: TypeSymbol,
    declared_supertypes: Vec<String>,
    extension: Option<ConceptExtension>,
}

#[derive(Debug, Clone)]
struct SymbolEntry {
    signature: Signature,
    kind: SymbolKind,
}

#[derive(Debug, Clone)]
pub struct Vocabulary {
    types: IndexMap<String, TypeEntry>,
    symbols: IndexMap<String, SymbolEntry>,
    /// User-declared names (types and symbols) in declaration order.
    order: Vec<String>,
    spans: HashMap<String, Span>,
}

impl Default for Vocabulary {
    fn default() -> Self {
        Self::new()
    }
}

impl Vocabulary {
    /// A vocabulary holding only the built-in types and symbols.
    pub fn new() -> Self {
        let mut vocab = Vocabulary {
            types: IndexMap::new(),
            symbols: IndexMap::new(),
            order: Vec::new(),
            spans: HashMap::new(),
        };
        for builtin in Builtin::ALL {
            vocab.insert_type(builtin.name(), Some(builtin), Vec::new(), None);
        }
        for op in ARITHMETIC {
            vocab.symbols.insert(
                op.to_string(),
                SymbolEntry {
                    signature: Signature::new(op, vec![NAT.into(), NAT.into()], NAT),
                    kind: SymbolKind::Arithmetic,
                },
            );
        }
        vocab
    }

    fn insert_type(
        &mut self,
        name: &str,
        builtin: Option<Builtin>,
        supertypes: Vec<String>,
        extension: Option<Vec<String>>,
    ) {
        let extension = extension.map(|members| ConceptExtension { type_name: name.to_string(), members });
        self.types.insert(
            name.to_string(),
            TypeEntry {
                symbol: TypeSymbol { name: name.to_string(), builtin },
                declared_supertypes: supertypes,
                extension,
            },
        );
        self.symbols.insert(
            name.to_string(),
            SymbolEntry {
                signature: Signature::new(name, vec![UNIVERSE.into()], BOOL),
                kind: SymbolKind::TypePredicate,
            },
        );
        let eq = equality_key(name);
        self.symbols.insert(
            eq,
            SymbolEntry {
                signature: Signature::new("=", vec![name.into(), name.into()], BOOL),
                kind: SymbolKind::Equality,
            },
        );
        if builtin.is_none() {
            self.order.push(name.to_string());
        }
    }

    fn name_taken(&self, name: &str) -> bool {
        self.types.contains_key(name) || self.symbols.contains_key(name)
    }

    /// Declare a type. An empty supertype list means `name <: Universe`.
    pub fn declare_type(
        &mut self,
        name: &str,
        supertypes: &[&str],
        extension: Option<&[&str]>,
    ) -> Result<(), VocabError> {
        if self.name_taken(name) {
            return Err(VocabError::DuplicateType(name.to_string()));
        }
        if let Some(sup) = supertypes.iter().find(|s| **s == name) {
            return Err(VocabError::CyclicSubtyping(name.to_string(), sup.to_string()));
        }
        for sup in supertypes {
            if !self.types.contains_key(*sup) {
                return Err(VocabError::UnknownSupertype { name: name.to_string(), supertype: sup.to_string() });
            }
        }
        if extension.is_some()
            && (supertypes.is_empty() || !supertypes.iter().all(|s| self.conforms(s, CONCEPT)))
        {
            return Err(VocabError::ExtensionOnNonConceptType(name.to_string()));
        }
        self.insert_type(
            name,
            None,
            supertypes.iter().map(|s| s.to_string()).collect(),
            extension.map(|m| m.iter().map(|s| s.to_string()).collect()),
        );
        Ok(())
    }

    pub fn declare_symbol(&mut self, name: &str, args: &[&str], result: &str) -> Result<(), VocabError> {
        if self.name_taken(name) {
            return Err(VocabError::DuplicateSymbol(name.to_string()));
        }
        for ty in args.iter().chain(std::iter::once(&result)) {
            if !self.types.contains_key(*ty) {
                return Err(VocabError::UnknownType(ty.to_string()));
            }
        }
        self.symbols.insert(
            name.to_string(),
            SymbolEntry {
                signature: Signature::new(name, args.iter().map(|s| s.to_string()).collect(), result),
                kind: SymbolKind::User,
            },
        );
        self.order.push(name.to_string());
        Ok(())
    }

    /// Build a vocabulary from declarations in any order (forward references
    /// allowed), collecting every problem instead of stopping at the first.
    pub fn from_declarations(decls: &[Declaration]) -> (Vocabulary, ValidationReport) {
        let mut vocab = Vocabulary::new();
        let mut report = ValidationReport::default();

        for decl in decls {
            if let Declaration::Type { name, supertypes, extension, span } = decl {
                if vocab.name_taken(name) {
                    report.push(VocabError::DuplicateType(name.clone()), *span);
                    continue;
                }
                vocab.insert_type(name, None, supertypes.clone(), extension.clone());
                if let Some(span) = span {
                    vocab.spans.insert(name.clone(), *span);
                }
            }
        }
        for decl in decls {
            if let Declaration::Symbol { name, args, result, span } = decl {
                if vocab.name_taken(name) {
                    report.push(VocabError::DuplicateSymbol(name.clone()), *span);
                    continue;
                }
                let unknown: Vec<&String> =
                    args.iter().chain(std::iter::once(result)).filter(|t| !vocab.types.contains_key(*t)).collect();
                if !unknown.is_empty() {
                    for ty in unknown {
                        report.push(VocabError::UnknownType(ty.clone()), *span);
                    }
                    continue;
                }
                vocab.symbols.insert(
                    name.clone(),
                    SymbolEntry { signature: Signature::new(name.clone(), args.clone(), result.clone()), kind: SymbolKind::User },
                );
                vocab.order.push(name.clone());
                if let Some(span) = span {
                    vocab.spans.insert(name.clone(), *span);
                }
            }
        }
        // Unknown supertypes are dropped so later queries stay well-defined.
        let names: Vec<String> = vocab.types.keys().cloned().collect();
        for name in &names {
            let sups = vocab.types[name].declared_supertypes.clone();
            let (known, unknown): (Vec<String>, Vec<String>) =
                sups.into_iter().partition(|s| vocab.types.contains_key(s));
            for sup in unknown {
                let span = vocab.spans.get(name).copied();
                report.push(VocabError::UnknownSupertype { name: name.clone(), supertype: sup }, span);
            }
            vocab.types.get_mut(name).expect("present").declared_supertypes = known;
        }
        report.violations.extend(vocab.validate().violations);
        (vocab, report)
    }

    /// Check every vocabulary invariant, reporting each violation.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let span = |name: &str| self.spans.get(name).copied();

        for (name, entry) in &self.types {
            for sup in &entry.declared_supertypes {
                if !self.types.contains_key(sup) {
                    report.push(VocabError::UnknownSupertype { name: name.clone(), supertype: sup.clone() }, span(name));
                }
            }
        }
        for (a, b) in self.cycle_edges() {
            report.push(VocabError::CyclicSubtyping(a.clone(), b), span(&a));
        }
        for entry in self.symbols.values().filter(|s| s.kind == SymbolKind::User) {
            let sig = &entry.signature;
            for ty in sig.args.iter().chain(std::iter::once(&sig.result)) {
                if !self.types.contains_key(ty) {
                    report.push(VocabError::UnknownType(ty.clone()), span(&sig.name));
                }
            }
        }
        let concepts: HashSet<String> = self.concept_universe().into_iter().collect();
        for (name, entry) in &self.types {
            match self.symbols.get(name.as_str()) {
                Some(s)
                    if s.kind == SymbolKind::TypePredicate
                        && s.signature.args == [UNIVERSE]
                        && s.signature.result == BOOL => {}
                _ => report.push(VocabError::MissingTypePredicate(name.clone()), span(name)),
            }
            let Some(ext) = &entry.extension else { continue };
            if name == CONCEPT || !self.strictly_below(name, CONCEPT) {
                report.push(VocabError::ExtensionOnNonConceptType(name.clone()), span(name));
                continue;
            }
            for member in &ext.members {
                if !concepts.contains(member) {
                    report.push(
                        VocabError::UnknownExtensionMember { type_name: name.clone(), member: member.clone() },
                        span(name),
                    );
                }
            }
            for sup in self.ancestors(name) {
                if sup == *name {
                    continue;
                }
                if let Some(sup_ext) = self.extension(&sup) {
                    for member in ext.members.iter().filter(|m| !sup_ext.contains(m)) {
                        report.push(
                            VocabError::ExtensionNotContained { sub: name.clone(), sup: sup.clone(), member: member.clone() },
                            span(name),
                        );
                    }
                }
            }
        }
        report
    }

    /// Edges `(a, b)` of declared subtyping that lie on a cycle.
    fn cycle_edges(&self) -> Vec<(String, String)> {
        let mut found = Vec::new();
        for (name, entry) in &self.types {
            for sup in &entry.declared_supertypes {
                if sup == name || self.reaches(sup, name) {
                    found.push((name.clone(), sup.clone()));
                }
            }
        }
        found
    }

    fn reaches(&self, from: &str, to: &str) -> bool {
        let mut stack = vec![from.to_string()];
        let mut seen = HashSet::new();
        while let Some(t) = stack.pop() {
            if t == to {
                return true;
            }
            if !seen.insert(t.clone()) {
                continue;
            }
            stack.extend(self.direct_supertypes(&t));
        }
        false
    }

    pub fn has_type(&self, name: &str) -> bool {
        self.types.contains_key(name)
    }

    pub fn type_symbol(&self, name: &str) -> Option<&TypeSymbol> {
        self.types.get(name).map(|e| &e.symbol)
    }

    /// Type symbols in declaration order, built-ins first.
    pub fn types(&self) -> impl Iterator<Item = &TypeSymbol> {
        self.types.values().map(|e| &e.symbol)
    }

    pub fn user_types(&self) -> impl Iterator<Item = &TypeSymbol> {
        self.types().filter(|t| t.builtin.is_none())
    }

    /// Direct supertypes, including the implicit edge to `Universe`.
    pub fn direct_supertypes(&self, name: &str) -> Vec<String> {
        match self.types.get(name) {
            None => Vec::new(),
            Some(_) if name == UNIVERSE => Vec::new(),
            Some(e) if e.declared_supertypes.is_empty() => vec![UNIVERSE.to_string()],
            Some(e) => e.declared_supertypes.clone(),
        }
    }

    pub fn declared_supertypes(&self, name: &str) -> &[String] {
        self.types.get(name).map(|e| e.declared_supertypes.as_slice()).unwrap_or(&[])
    }

    /// Reflexive subtype test over the direct-edge DAG.
    pub fn is_subtype(&self, sub: &str, sup: &str) -> Result<bool, VocabError> {
        for t in [sub, sup] {
            if !self.types.contains_key(t) {
                return Err(VocabError::UnknownType(t.to_string()));
            }
        }
        Ok(self.reaches(sub, sup))
    }

    /// `is_subtype` that answers `false` for unknown types.
    pub fn conforms(&self, sub: &str, sup: &str) -> bool {
        self.types.contains_key(sub) && self.types.contains_key(sup) && self.reaches(sub, sup)
    }

    pub fn strictly_below(&self, sub: &str, sup: &str) -> bool {
        sub != sup && self.conforms(sub, sup)
    }

    /// All supertypes of `name` (itself included), nearest first.
    pub fn ancestors(&self, name: &str) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        let mut queue = std::collections::VecDeque::from([name.to_string()]);
        while let Some(t) = queue.pop_front() {
            if out.contains(&t) {
                continue;
            }
            queue.extend(self.direct_supertypes(&t));
            out.push(t);
        }
        out
    }

    /// The least common supertype of `a` and `b`; among several minimal
    /// candidates the earliest declared one wins.
    pub fn least_common_supertype(&self, a: &str, b: &str) -> String {
        let up_b: HashSet<String> = self.ancestors(b).into_iter().collect();
        let common: Vec<String> = self.ancestors(a).into_iter().filter(|t| up_b.contains(t)).collect();
        let minimal = |c: &String| !common.iter().any(|d| self.strictly_below(d, c));
        self.types
            .keys()
            .find(|t| common.contains(t) && minimal(t))
            .cloned()
            .unwrap_or_else(|| UNIVERSE.to_string())
    }

    pub fn is_concept_type(&self, name: &str) -> bool {
        self.conforms(name, CONCEPT)
    }

    /// The declared extension of a concept type.
    pub fn extension(&self, name: &str) -> Option<&[String]> {
        self.types.get(name)?.extension.as_ref().map(|e| e.members.as_slice())
    }

    pub fn extensions(&self) -> impl Iterator<Item = &ConceptExtension> {
        self.types.values().filter_map(|e| e.extension.as_ref())
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.symbols.contains_key(name)
    }

    /// Signature of any symbol: user symbols, type predicates (looked up by
    /// the type's name), equality instances (`=_T`) and arithmetic.
    pub fn signature(&self, name: &str) -> Option<&Signature> {
        self.symbols.get(name).map(|e| &e.signature)
    }

    pub fn symbol_kind(&self, name: &str) -> Option<SymbolKind> {
        self.symbols.get(name).map(|e| e.kind)
    }

    pub fn equality(&self, ty: &str) -> Option<&Signature> {
        self.signature(&equality_key(ty))
    }

    /// Every signature, in registration order.
    pub fn signatures(&self) -> impl Iterator<Item = (&str, &Signature, SymbolKind)> {
        self.symbols.iter().map(|(k, e)| (k.as_str(), &e.signature, e.kind))
    }

    pub fn user_symbols(&self) -> impl Iterator<Item = &Signature> {
        self.symbols.values().filter(|e| e.kind == SymbolKind::User).map(|e| &e.signature)
    }

    /// One concept per built-in type, user type and user symbol. A type and
    /// its type predicate share the concept named after the type.
    pub fn concept_universe(&self) -> Vec<String> {
        Builtin::ALL.iter().map(|b| b.name().to_string()).chain(self.order.iter().cloned()).collect()
    }

    pub fn is_concept(&self, name: &str) -> bool {
        Builtin::ALL.iter().any(|b| b.name() == name) || self.order.iter().any(|n| n == name)
    }

    pub fn span_of(&self, name: &str) -> Option<Span> {
        self.spans.get(name).copied()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn animals() -> Vocabulary {
        let mut v = Vocabulary::new();
        v.declare_type("Animal", &[], None).unwrap();
        v.declare_type("Cat", &["Animal"], None).unwrap();
        v.declare_type("Dog", &["Animal"], None).unwrap();
        v.declare_symbol("age", &["Animal"], NAT).unwrap();
        v.declare_symbol("tom", &[], "Cat").unwrap();
        v.declare_symbol("bark", &["Dog"], BOOL).unwrap();
        v.declare_symbol("meow", &["Cat"], BOOL).unwrap();
        v
    }

    #[test]
    fn declared_subtypes() {
        let v = animals();
        assert!(v.is_subtype("Cat", "Animal").unwrap());
        assert!(v.is_subtype("Cat", UNIVERSE).unwrap());
        assert!(v.is_subtype("Cat", "Cat").unwrap());
        assert!(!v.is_subtype("Animal", "Cat").unwrap());
        assert!(!v.is_subtype("Cat", "Dog").unwrap());
        assert_eq!(v.is_subtype("Cat", "Mouse"), Err(VocabError::UnknownType("Mouse".into())));
    }

    #[test]
    fn implicit_universe_edge() {
        let mut v = Vocabulary::new();
        v.declare_type("T", &[], None).unwrap();
        assert!(v.is_subtype("T", UNIVERSE).unwrap());
        assert_eq!(v.direct_supertypes("T"), vec![UNIVERSE.to_string()]);
        assert!(v.direct_supertypes(UNIVERSE).is_empty());
        for b in [BOOL, NAT, CONCEPT] {
            assert!(v.is_subtype(b, UNIVERSE).unwrap());
        }
    }

    #[test]
    fn concept_type_with_extension() {
        let mut v = animals();
        v.declare_type("Sound", &[CONCEPT], Some(&["meow", "bark"])).unwrap();
        assert_eq!(v.extension("Sound").unwrap(), ["meow", "bark"]);
        assert!(v.is_concept_type("Sound"));
        assert!(v.validate().is_empty());
    }

    #[test]
    fn declaration_errors() {
        let mut v = animals();
        assert_eq!(
            v.declare_type("Cat2", &["Cat2"], None),
            Err(VocabError::CyclicSubtyping("Cat2".into(), "Cat2".into()))
        );
        assert!(matches!(v.declare_type("Cat", &["Cat"], None), Err(VocabError::DuplicateType(_))));
        assert!(matches!(v.declare_type("Bool", &[], None), Err(VocabError::DuplicateType(_))));
        assert!(matches!(v.declare_type("Mouse", &["Rodent"], None), Err(VocabError::UnknownSupertype { .. })));
        assert_eq!(
            v.declare_type("Noise", &["Animal"], Some(&["meow"])),
            Err(VocabError::ExtensionOnNonConceptType("Noise".into()))
        );
        assert!(matches!(v.declare_symbol("meow", &["Cat"], BOOL), Err(VocabError::DuplicateSymbol(_))));
        assert!(matches!(v.declare_symbol("Cat", &[], BOOL), Err(VocabError::DuplicateSymbol(_))));
        assert_eq!(v.declare_symbol("purr", &["Kitten"], BOOL), Err(VocabError::UnknownType("Kitten".into())));
    }

    #[test]
    fn symbol_classification() {
        let v = animals();
        assert!(v.signature("bark").unwrap().is_predicate());
        assert_eq!(v.signature("tom").unwrap().arity(), 0);
        assert!(!v.signature("age").unwrap().is_predicate());
        assert_eq!(v.signature("age").unwrap().to_string(), "age : Animal -> Nat");
        let cat_pred = v.signature("Cat").unwrap();
        assert_eq!(v.symbol_kind("Cat"), Some(SymbolKind::TypePredicate));
        assert_eq!((cat_pred.args.as_slice(), cat_pred.result.as_str()), (&[UNIVERSE.to_string()][..], BOOL));
        assert_eq!(v.equality("Animal").unwrap().args, ["Animal", "Animal"]);
        assert_eq!(v.signature("+").unwrap().result, NAT);
    }

    #[test]
    fn concept_universe_contents() {
        let v = Vocabulary::new();
        assert_eq!(v.concept_universe(), [UNIVERSE, BOOL, NAT, CONCEPT]);
        let mut v = animals();
        let all = v.concept_universe();
        for c in [BOOL, NAT, "Animal", "Cat", "Dog", "age", "tom", "bark", "meow"] {
            assert!(all.iter().any(|x| x == c), "{c}");
        }
        let before = all.len();
        v.declare_symbol("f", &[], "Cat").unwrap();
        let after = v.concept_universe();
        assert_eq!(after.len(), before + 1);
        assert_eq!(after.last().unwrap(), "f");
    }

    #[test]
    fn validate_reports() {
        assert!(animals().validate().is_empty());

        let decls = vec![
            Declaration::Type {
                name: "Noise".into(),
                supertypes: vec!["Animal".into()],
                extension: Some(vec!["meow".into()]),
                span: Some(Span::new(3, 1)),
            },
            Declaration::Type { name: "Animal".into(), supertypes: vec![], extension: None, span: None },
            Declaration::Symbol { name: "meow".into(), args: vec!["Animal".into()], result: BOOL.into(), span: None },
        ];
        let (_, report) = Vocabulary::from_declarations(&decls);
        assert!(report.has("ExtensionOnNonConceptType"));
        assert_eq!(report.violations[0].location, Some(Span::new(3, 1)));

        let mut v = animals();
        v.declare_type("Sound", &[CONCEPT], Some(&["meow", "purr"])).unwrap();
        let report = v.validate();
        assert_eq!(report.violations.len(), 1);
        assert!(report.has("UnknownExtensionMember"));
    }

    #[test]
    fn forward_references_and_cycles() {
        let ty = |n: &str, s: &[&str]| Declaration::Type {
            name: n.into(),
            supertypes: s.iter().map(|x| x.to_string()).collect(),
            extension: None,
            span: None,
        };
        let (v, report) = Vocabulary::from_declarations(&[ty("Cat", &["Animal"]), ty("Animal", &[])]);
        assert!(report.is_empty());
        assert!(v.conforms("Cat", "Animal"));

        let (_, report) = Vocabulary::from_declarations(&[ty("A", &["B"]), ty("B", &["A"])]);
        assert!(report.has("CyclicSubtyping"));
    }

    #[test]
    fn least_common_supertypes() {
        let v = animals();
        assert_eq!(v.least_common_supertype("Cat", "Dog"), "Animal");
        assert_eq!(v.least_common_supertype("Cat", "Animal"), "Animal");
        assert_eq!(v.least_common_supertype("Cat", "Cat"), "Cat");
        assert_eq!(v.least_common_supertype("Cat", NAT), UNIVERSE);
    }
}

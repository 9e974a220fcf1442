use std::collections::BTreeMap;

use serde::Serialize;

use crate::grounding::product;
use crate::vocabulary::{SymbolKind, Vocabulary, BOOL, CONCEPT, NAT, UNIVERSE};

use super::{join_elements, DomainElement, EvalError, FunctionGraph, Structure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationKind {
    UnknownName,
    MissingType,
    EmptyType,
    Containment,
    MissingInterpretation,
    Arity,
    Typing,
    Functionality,
    Totality,
    ForcedConflict,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StructureViolation {
    pub kind: ViolationKind,
    /// The type or symbol the violation is about.
    pub subject: String,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub violations: Vec<StructureViolation>,
}

impl StructureReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }

    fn push(&mut self, kind: ViolationKind, subject: &str, message: String) {
        self.violations.push(StructureViolation { kind, subject: subject.to_string(), message });
    }
}

impl std::fmt::Display for StructureReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let lines: Vec<&str> = self.violations.iter().map(|v| v.message.as_str()).collect();
        f.write_str(&lines.join("; "))
    }
}

/// Type carriers of a structure, forced parts included.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Carriers<'a> {
    pub vocab: &'a Vocabulary,
    pub structure: &'a Structure,
}

impl<'a> Carriers<'a> {
    /// Whether the carrier of `ty` is fixed by the vocabulary.
    pub fn is_forced(&self, ty: &str) -> bool {
        matches!(ty, UNIVERSE | BOOL | NAT | CONCEPT) || self.vocab.extension(ty).is_some()
    }

    pub fn member(&self, ty: &str, d: &DomainElement) -> bool {
        match ty {
            UNIVERSE => true,
            BOOL => matches!(d, DomainElement::Bool(_)),
            NAT => matches!(d, DomainElement::Nat(_)),
            CONCEPT => matches!(d, DomainElement::Concept(s) if self.vocab.is_concept(s)),
            _ => match self.vocab.extension(ty) {
                Some(members) => matches!(d, DomainElement::Concept(s) if members.contains(s)),
                None => self.structure.types.get(ty).is_some_and(|set| set.contains(d)),
            },
        }
    }

    fn nat_range(&self, ty: &str) -> Result<Vec<DomainElement>, EvalError> {
        let bound = self.structure.nat_bound.ok_or_else(|| EvalError::UnboundedNatQuantifier(ty.to_string()))?;
        Ok((0..=bound).map(DomainElement::Nat).collect())
    }

    /// The elements of `ty`, in canonical order.
    pub fn carrier(&self, ty: &str) -> Result<Vec<DomainElement>, EvalError> {
        let concepts = |names: &[String]| names.iter().map(|s| DomainElement::concept(s)).collect::<Vec<_>>();
        Ok(match ty {
            BOOL => vec![DomainElement::Bool(false), DomainElement::Bool(true)],
            NAT => self.nat_range(ty)?,
            CONCEPT => concepts(&self.vocab.concept_universe()),
            UNIVERSE => {
                let mut all: Vec<DomainElement> = self.carrier(BOOL)?;
                all.extend(self.nat_range(ty)?);
                all.extend(self.carrier(CONCEPT)?);
                for set in self.structure.types.values() {
                    all.extend(set.iter().cloned());
                }
                all.sort();
                all.dedup();
                all
            }
            _ => match self.vocab.extension(ty) {
                Some(members) => concepts(members),
                None => self.structure.types.get(ty).map(|s| s.iter().cloned().collect()).unwrap_or_default(),
            },
        })
    }
}

/// Check every well-formedness condition on `s` as a structure over `vocab`.
/// Forced parts are synthesized; a user entry that contradicts one is a
/// violation.
pub fn validate_structure(vocab: &Vocabulary, s: &Structure) -> StructureReport {
    let c = Carriers { vocab, structure: s };
    let mut report = StructureReport::default();
    for (name, set) in &s.types {
        if !vocab.has_type(name) {
            report.push(ViolationKind::UnknownName, name, format!("unknown type {name}"));
        } else if c.is_forced(name) {
            let forced = c.carrier(name).ok();
            if forced.as_deref() != Some(&set.iter().cloned().collect::<Vec<_>>()[..]) {
                report.push(ViolationKind::ForcedConflict, name, format!("the elements of {name} are fixed"));
            }
        }
    }
    for t in vocab.user_types() {
        let name = &t.name;
        if c.is_forced(name) {
            continue;
        }
        let Some(set) = s.types.get(name) else {
            report.push(ViolationKind::MissingType, name, format!("type {name} has no elements listed"));
            continue;
        };
        if set.is_empty() {
            report.push(ViolationKind::EmptyType, name, format!("type {name} is empty"));
        }
        for sup in vocab.direct_supertypes(name) {
            for d in set.iter().filter(|d| !c.member(&sup, d)) {
                report.push(ViolationKind::Containment, name, format!("{d} is in {name} but not in its supertype {sup}"));
            }
        }
    }
    for name in s.interps.keys() {
        match vocab.symbol_kind(name) {
            None => report.push(ViolationKind::UnknownName, name, format!("unknown symbol {name}")),
            Some(SymbolKind::User) => {}
            Some(_) => report.push(ViolationKind::ForcedConflict, name, format!("the interpretation of {name} is fixed")),
        }
        if let (Some(mine), Some(fixed)) = (s.interps.get(name), s.fixed.get(name)) {
            if mine != fixed {
                report.push(ViolationKind::ForcedConflict, name, format!("{name} contradicts its defined values"));
            }
        }
    }
    for sig in vocab.user_symbols() {
        let name = &sig.name;
        let Some(graph) = s.graph(name) else {
            report.push(ViolationKind::MissingInterpretation, name, format!("symbol {name} is not interpreted"));
            continue;
        };
        check_graph(&c, name, &sig.args, &sig.result, graph, &mut report);
    }
    report
}

fn check_graph(
    c: &Carriers,
    name: &str,
    args: &[String],
    result: &str,
    graph: &FunctionGraph,
    report: &mut StructureReport,
) {
    let mut seen: BTreeMap<&Vec<DomainElement>, &DomainElement> = BTreeMap::new();
    for (row, value) in &graph.rows {
        let shown = format!("{name}({})", join_elements(row));
        if row.len() != args.len() {
            report.push(ViolationKind::Arity, name, format!("{shown} has {} arguments, expected {}", row.len(), args.len()));
            continue;
        }
        for (d, ty) in row.iter().zip(args) {
            if !c.member(ty, d) {
                report.push(ViolationKind::Typing, name, format!("argument {d} of {shown} is not in {ty}"));
            }
        }
        if !c.member(result, value) {
            report.push(ViolationKind::Typing, name, format!("value {value} of {shown} is not in {result}"));
        }
        match seen.get(row) {
            Some(other) if *other != value => {
                report.push(ViolationKind::Functionality, name, format!("{shown} is both {other} and {value}"));
            }
            _ => {
                seen.insert(row, value);
            }
        }
    }
    if result == BOOL {
        return;
    }
    let Ok(carriers) = args.iter().map(|t| c.carrier(t)).collect::<Result<Vec<_>, _>>() else {
        return;
    };
    if let Some(missing) = product(carriers.iter().map(Vec::as_slice)).into_iter().find(|t| !seen.contains_key(t)) {
        report.push(ViolationKind::Totality, name, format!("{name}({}) has no value", join_elements(&missing)));
    }
}

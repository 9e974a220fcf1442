//! Brute-force model finding over bounded domains.
//!
//! Candidates are encoded as a digit vector and visited in lexicographic
//! order, the first digit being the most significant:
//!
//! 1. user types in topological order (declaration order among
//!    independent types). A maximal type with bound `n` is
//!    `{t_1, ..., t_n}` where `t` is its lowercased name. Any other type
//!    ranges over the non-empty subsets of the intersection of its
//!    supertypes, in increasing order of the membership mask whose lowest
//!    bit is the first element;
//! 2. user symbols not fixed by facts, in declaration order. Each argument
//!    tuple of the product of the argument carriers (first argument most
//!    significant) is one digit whose value is the index of the result in
//!    the result carrier. Predicates range over `false, true`.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;
use thiserror::Error;

use crate::grounding::{build_intensional_interp, product, GroundInterpretation};
use crate::syntax::Theory;
use crate::typing::check_sentence_with;
use crate::vocabulary::{Vocabulary, BOOL, UNIVERSE};

use super::validate::Carriers;
use super::{DomainElement, EvalError, FunctionGraph, Structure};

pub const DEFAULT_MAX_CANDIDATES: u128 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelOptions {
    /// Upper end of the `Nat` carrier used for enumeration and quantifiers.
    pub nat_bound: Option<u64>,
    pub max_candidates: u128,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { nat_bound: None, max_candidates: DEFAULT_MAX_CANDIDATES }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum ModelError {
    #[error("no domain bound given for {0}")]
    BoundMissing(String),
    #[error("invalid bound for {0}: bounds apply to maximal user types and must be at least 1")]
    InvalidBound(String),
    #[error("{count} candidate structures exceed the limit of {limit}")]
    ExplosionGuard { count: String, limit: String },
    #[error("axiom {label} is not well-typed: {message}")]
    IllTyped { label: String, message: String },
    #[error("{0}")]
    Theory(String),
    #[error("{0}")]
    Eval(EvalError),
}

impl ModelError {
    pub fn kind_name(&self) -> &'static str {
        match self {
            ModelError::BoundMissing(_) => "BoundMissing",
            ModelError::InvalidBound(_) => "InvalidBound",
            ModelError::ExplosionGuard { .. } => "ExplosionGuard",
            ModelError::IllTyped { .. } => "IllTypedSentence",
            ModelError::Theory(_) => "InvalidTheory",
            ModelError::Eval(e) => e.kind_name(),
        }
    }
}

struct Search<'a> {
    vocab: &'a Vocabulary,
    interp: GroundInterpretation,
    opts: ModelOptions,
    fixed: Structure,
}

/// One assignment of carriers to the user types together with the
/// symbol digits it induces.
struct Layout {
    base: Structure,
    /// `(symbol, argument tuples, result carrier, is predicate)`.
    symbols: Vec<(String, Vec<Vec<DomainElement>>, Vec<DomainElement>, bool)>,
}

impl Layout {
    fn count(&self) -> u128 {
        self.symbols.iter().fold(1u128, |acc, (_, rows, results, _)| {
            let per = (results.len() as u128).checked_pow(rows.len() as u32).unwrap_or(u128::MAX);
            acc.saturating_mul(per)
        })
    }

    fn build(&self, digits: &[usize]) -> Structure {
        let mut s = self.base.clone();
        let mut i = 0;
        for (name, rows, results, predicate) in &self.symbols {
            let mut g = FunctionGraph::new();
            for args in rows {
                let value = &results[digits[i]];
                i += 1;
                if !*predicate || *value == DomainElement::Bool(true) {
                    g.insert(args.clone(), value.clone());
                }
            }
            s.set_interp(name, g);
        }
        s
    }

    fn radices(&self) -> Vec<usize> {
        self.symbols.iter().flat_map(|(_, rows, results, _)| std::iter::repeat(results.len()).take(rows.len())).collect()
    }
}

impl<'a> Search<'a> {
    fn new(theory: &'a Theory, bounds: &BTreeMap<String, usize>, opts: ModelOptions) -> Result<Self, ModelError> {
        let vocab = &theory.vocabulary;
        let interp = build_intensional_interp(theory).map_err(|e| ModelError::Theory(e.to_string()))?;
        for axiom in &theory.axioms {
            let ill = |message: String| ModelError::IllTyped { label: axiom.label.clone(), message };
            match check_sentence_with(&interp, &axiom.formula) {
                Ok(check) => check.result.map(|_| ()).map_err(|e| ill(e.to_string()))?,
                Err(e) => return Err(ill(e.to_string())),
            }
        }
        let search = Search { vocab, interp, opts, fixed: Structure::new() };
        for (name, &n) in bounds {
            if !search.maximal_types().contains(name) || n == 0 {
                return Err(ModelError::InvalidBound(name.clone()));
            }
        }
        if let Some(t) = search.maximal_types().into_iter().find(|t| !bounds.contains_key(t)) {
            return Err(ModelError::BoundMissing(t));
        }
        let mut fixed = Structure::new();
        fixed.adopt_facts(&theory.concept_facts);
        Ok(Search { fixed, ..search })
    }

    fn enumerated(&self, ty: &str) -> bool {
        let c = Carriers { vocab: self.vocab, structure: &self.fixed };
        self.vocab.type_symbol(ty).is_some_and(|t| t.builtin.is_none()) && !c.is_forced(ty)
    }

    fn maximal_types(&self) -> Vec<String> {
        self.vocab
            .user_types()
            .map(|t| t.name.clone())
            .filter(|t| self.enumerated(t) && self.vocab.direct_supertypes(t) == [UNIVERSE])
            .collect()
    }

    /// Enumerated user types, every type after its supertypes.
    fn type_order(&self) -> Vec<String> {
        let mut pending: Vec<String> = self.vocab.user_types().map(|t| t.name.clone()).filter(|t| self.enumerated(t)).collect();
        let mut out: Vec<String> = Vec::new();
        while !pending.is_empty() {
            let ready = pending
                .iter()
                .position(|t| self.vocab.direct_supertypes(t).iter().all(|s| !self.enumerated(s) || out.contains(s)))
                .expect("the subtype relation is acyclic");
            out.push(pending.remove(ready));
        }
        out
    }

    fn empty_structure(&self) -> Structure {
        Structure { fixed: self.fixed.fixed.clone(), nat_bound: self.opts.nat_bound, ..Structure::new() }
    }

    /// Every admissible assignment of carriers to the enumerated types.
    fn type_assignments(&self, bounds: &BTreeMap<String, usize>) -> Result<Vec<Structure>, ModelError> {
        let mut partial = vec![self.empty_structure()];
        for ty in self.type_order() {
            let mut next = Vec::new();
            for s in &partial {
                for set in self.type_options(&ty, s, bounds)? {
                    let mut s = s.clone();
                    s.types.insert(ty.clone(), set);
                    next.push(s);
                }
                if next.len() as u128 > self.opts.max_candidates {
                    return Err(self.explosion(u128::MAX));
                }
            }
            partial = next;
        }
        Ok(partial)
    }

    fn type_options(
        &self,
        ty: &str,
        s: &Structure,
        bounds: &BTreeMap<String, usize>,
    ) -> Result<Vec<BTreeSet<DomainElement>>, ModelError> {
        if let Some(&n) = bounds.get(ty) {
            let stem = ty.to_lowercase();
            return Ok(vec![(1..=n).map(|i| DomainElement::Plain(format!("{stem}_{i}"))).collect()]);
        }
        let c = Carriers { vocab: self.vocab, structure: s };
        let sups = self.vocab.direct_supertypes(ty);
        let mut pool = c.carrier(&sups[0]).map_err(|e| self.missing_nat(e))?;
        for sup in &sups[1..] {
            pool.retain(|d| c.member(sup, d));
        }
        if pool.len() >= 64 {
            return Err(self.explosion(u128::MAX));
        }
        Ok((1u64..1 << pool.len())
            .map(|mask| pool.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d.clone()).collect())
            .collect())
    }

    fn layout(&self, base: Structure) -> Result<Layout, ModelError> {
        let c = Carriers { vocab: self.vocab, structure: &base };
        let mut symbols = Vec::new();
        for sig in self.vocab.user_symbols() {
            if self.interp.is_fixed(&sig.name) {
                continue;
            }
            let slots = sig.args.iter().map(|t| c.carrier(t)).collect::<Result<Vec<_>, _>>().map_err(|e| self.missing_nat(e))?;
            let rows = product(slots.iter().map(Vec::as_slice));
            let results = c.carrier(&sig.result).map_err(|e| self.missing_nat(e))?;
            symbols.push((sig.name.clone(), rows, results, sig.result == BOOL));
        }
        Ok(Layout { base, symbols })
    }

    fn missing_nat(&self, e: EvalError) -> ModelError {
        match e {
            EvalError::UnboundedNatQuantifier(_) => ModelError::BoundMissing("Nat (use a Nat bound)".into()),
            other => ModelError::Eval(other),
        }
    }

    fn explosion(&self, count: u128) -> ModelError {
        let count = if count == u128::MAX { "too many".to_string() } else { count.to_string() };
        ModelError::ExplosionGuard { count, limit: self.opts.max_candidates.to_string() }
    }

    fn layouts(&self, bounds: &BTreeMap<String, usize>) -> Result<(Vec<Layout>, u128), ModelError> {
        let layouts = self.type_assignments(bounds)?.into_iter().map(|s| self.layout(s)).collect::<Result<Vec<_>, _>>()?;
        let total = layouts.iter().fold(0u128, |acc, l| acc.saturating_add(l.count()));
        if total > self.opts.max_candidates {
            return Err(self.explosion(total));
        }
        Ok((layouts, total))
    }
}

/// Number of candidate structures `find_models` would examine.
pub fn count_candidates(theory: &Theory, bounds: &BTreeMap<String, usize>, opts: ModelOptions) -> Result<u128, ModelError> {
    let search = Search::new(theory, bounds, opts)?;
    search.layouts(bounds).map(|(_, n)| n)
}

/// Structures over the bounded domains that satisfy every axiom, in
/// enumeration order, at most `limit` of them.
pub fn find_models(
    theory: &Theory,
    bounds: &BTreeMap<String, usize>,
    limit: Option<usize>,
    opts: ModelOptions,
) -> Result<Vec<Structure>, ModelError> {
    let search = Search::new(theory, bounds, opts)?;
    let (layouts, _) = search.layouts(bounds)?;
    let mut found = Vec::new();
    if limit == Some(0) {
        return Ok(found);
    }
    for layout in &layouts {
        let radices = layout.radices();
        if radices.contains(&0) {
            continue;
        }
        let mut digits = vec![0usize; radices.len()];
        loop {
            let s = layout.build(&digits);
            if satisfies_all(&search.interp, theory, &s)? {
                found.push(s);
                if limit.is_some_and(|k| found.len() >= k) {
                    return Ok(found);
                }
            }
            if !advance(&mut digits, &radices) {
                break;
            }
        }
    }
    Ok(found)
}

fn satisfies_all(interp: &GroundInterpretation, theory: &Theory, s: &Structure) -> Result<bool, ModelError> {
    let model = super::Model::unchecked(interp, s);
    for axiom in &theory.axioms {
        match model.holds(&axiom.formula) {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(e @ EvalError::UnboundedNatQuantifier(_)) => return Err(ModelError::Eval(e)),
            Err(_) => return Ok(false),
        }
    }
    Ok(true)
}

/// Odometer step, last digit fastest. `false` once every value was visited.
fn advance(digits: &mut [usize], radices: &[usize]) -> bool {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < radices[i] {
            return true;
        }
        digits[i] = 0;
    }
    false
}

use std::collections::{HashMap, HashSet};

use crate::grounding::{self, GroundInterpretation};
use crate::syntax::{Expr, Formula, Term, Theory, EQ};
use crate::typing::{check_sentence_with, TypingContext};
use crate::vocabulary::{SymbolKind, Vocabulary, BOOL};

use super::validate::{validate_structure, Carriers, StructureReport};
use super::{join_elements, DomainElement, EvalError, Structure};

type EResult<T> = Result<T, EvalError>;

/// Values of free variables, each with the type it was bound at. Later
/// bindings shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    entries: Vec<(String, DomainElement, String)>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(mut self, var: &str, value: DomainElement, ty: &str) -> Self {
        self.push(var, value, ty);
        self
    }

    fn push(&mut self, var: &str, value: DomainElement, ty: &str) {
        self.entries.push((var.to_string(), value, ty.to_string()));
    }

    fn pop(&mut self) {
        self.entries.pop();
    }

    pub fn get(&self, var: &str) -> Option<&DomainElement> {
        self.entries.iter().rev().find(|(x, ..)| x == var).map(|(_, d, _)| d)
    }

    /// Visible bindings, outermost first.
    fn visible(&self) -> Vec<&(String, DomainElement, String)> {
        let mut seen = HashSet::new();
        let mut out: Vec<_> = self.entries.iter().rev().filter(|(x, ..)| seen.insert(x.as_str())).collect();
        out.reverse();
        out
    }
}

/// A validated structure together with the fixed concept extensions and
/// concept-function graphs of a theory.
#[derive(Debug, Clone)]
pub struct Model<'a> {
    interp: &'a GroundInterpretation,
    structure: &'a Structure,
    graphs: HashMap<&'a str, HashMap<&'a [DomainElement], &'a DomainElement>>,
}

impl<'a> Model<'a> {
    pub fn new(interp: &'a GroundInterpretation, structure: &'a Structure) -> Result<Self, StructureReport> {
        let report = validate_structure(interp.vocabulary(), structure);
        if !report.is_empty() {
            return Err(report);
        }
        Ok(Self::unchecked(interp, structure))
    }

    pub(crate) fn unchecked(interp: &'a GroundInterpretation, structure: &'a Structure) -> Self {
        let mut graphs: HashMap<&str, HashMap<&[DomainElement], &DomainElement>> = HashMap::new();
        for (name, g) in structure.fixed.iter().chain(&structure.interps) {
            let rows = graphs.entry(name.as_str()).or_default();
            for (args, value) in &g.rows {
                rows.entry(args.as_slice()).or_insert(value);
            }
        }
        Model { interp, structure, graphs }
    }

    pub fn vocabulary(&self) -> &'a Vocabulary {
        self.interp.vocabulary()
    }

    pub fn structure(&self) -> &'a Structure {
        self.structure
    }

    fn carriers(&self) -> Carriers<'a> {
        Carriers { vocab: self.interp.vocabulary(), structure: self.structure }
    }

    /// Truth of a sentence already known to be well-typed.
    pub fn holds(&self, sentence: &Formula) -> EResult<bool> {
        self.formula(sentence, &mut Assignment::new())
    }

    pub fn eval_formula(&self, f: &Formula, asg: &Assignment) -> EResult<bool> {
        self.formula(f, &mut asg.clone())
    }

    pub fn eval_term(&self, t: &Term, asg: &Assignment) -> EResult<DomainElement> {
        self.term(t, asg)
    }

    fn term(&self, t: &Term, asg: &Assignment) -> EResult<DomainElement> {
        match t {
            Term::Var(x) => asg.get(x).cloned().ok_or_else(|| EvalError::UnassignedVariable(x.clone())),
            Term::Nat(n) => Ok(DomainElement::Nat(*n)),
            Term::ConceptRef(s) | Term::Concept(s) => Ok(DomainElement::concept(s)),
            Term::Apply(f, args) => {
                let values = args.iter().map(|a| self.term(a, asg)).collect::<EResult<Vec<_>>>()?;
                self.apply(f, &values, false)
            }
            Term::Deref(head, args) => {
                let symbol = self.dereference(head, asg)?;
                let values = args.iter().map(|a| self.term(a, asg)).collect::<EResult<Vec<_>>>()?;
                self.apply(&symbol, &values, true)
            }
        }
    }

    fn dereference(&self, head: &Term, asg: &Assignment) -> EResult<String> {
        match self.term(head, asg)? {
            DomainElement::Concept(s) => Ok(s),
            other => Err(EvalError::RuntimeDerefMismatch { symbol: other.to_string(), args: String::new() }),
        }
    }

    /// `s^S(args)`. Through a dereference, arguments outside the declared
    /// argument types are a runtime mismatch rather than a missing value.
    fn apply(&self, symbol: &str, args: &[DomainElement], deref: bool) -> EResult<DomainElement> {
        let vocab = self.vocabulary();
        let c = self.carriers();
        let reject = || {
            let (symbol, args) = (symbol.to_string(), join_elements(args));
            if deref {
                EvalError::RuntimeDerefMismatch { symbol, args }
            } else {
                EvalError::UndefinedApplication { symbol, args }
            }
        };
        let sig = vocab.signature(symbol).ok_or_else(reject)?;
        if sig.arity() != args.len() || !args.iter().zip(&sig.args).all(|(d, ty)| c.member(ty, d)) {
            return Err(reject());
        }
        match vocab.symbol_kind(symbol) {
            Some(SymbolKind::TypePredicate) => Ok(DomainElement::Bool(c.member(symbol, &args[0]))),
            Some(SymbolKind::Equality) => Ok(DomainElement::Bool(args[0] == args[1])),
            Some(SymbolKind::Arithmetic) => {
                let (DomainElement::Nat(a), DomainElement::Nat(b)) = (&args[0], &args[1]) else { return Err(reject()) };
                let value = match symbol {
                    "+" => a.checked_add(*b),
                    "*" => a.checked_mul(*b),
                    _ => Some(a.saturating_sub(*b)),
                };
                value.map(DomainElement::Nat).ok_or_else(|| EvalError::UndefinedApplication {
                    symbol: symbol.to_string(),
                    args: join_elements(args),
                })
            }
            _ => match self.graphs.get(symbol).and_then(|g| g.get(args)) {
                Some(v) => Ok((*v).clone()),
                None if sig.result == BOOL => Ok(DomainElement::Bool(false)),
                None => Err(EvalError::UndefinedApplication { symbol: symbol.to_string(), args: join_elements(args) }),
            },
        }
    }

    fn truth(&self, value: DomainElement, symbol: &str, args: &[DomainElement]) -> EResult<bool> {
        value.as_bool().ok_or_else(|| EvalError::RuntimeDerefMismatch {
            symbol: symbol.to_string(),
            args: join_elements(args),
        })
    }

    fn formula(&self, f: &Formula, asg: &mut Assignment) -> EResult<bool> {
        match f {
            Formula::True => Ok(true),
            Formula::False => Ok(false),
            Formula::Atom(p, args) => {
                let values = args.iter().map(|a| self.term(a, asg)).collect::<EResult<Vec<_>>>()?;
                if p == EQ {
                    return Ok(values[0] == values[1]);
                }
                let v = self.apply(p, &values, false)?;
                self.truth(v, p, &values)
            }
            Formula::DerefAtom(head, args) => {
                let symbol = self.dereference(head, asg)?;
                let values = args.iter().map(|a| self.term(a, asg)).collect::<EResult<Vec<_>>>()?;
                let v = self.apply(&symbol, &values, true)?;
                self.truth(v, &symbol, &values)
            }
            Formula::Not(g) => Ok(!self.formula(g, asg)?),
            Formula::Or(a, b) => {
                let (x, y) = (self.formula(a, asg), self.formula(b, asg));
                or(x, y)
            }
            Formula::And(a, b) => {
                let (x, y) = (self.formula(a, asg), self.formula(b, asg));
                and(x, y)
            }
            Formula::Implies(a, b) => {
                let (x, y) = (self.formula(a, asg), self.formula(b, asg));
                or(x.map(|v| !v), y)
            }
            Formula::Iff(a, b) => {
                let (x, y) = (self.formula(a, asg)?, self.formula(b, asg)?);
                Ok(x == y)
            }
            Formula::Exists(x, ty, body) | Formula::Forall(x, ty, body) => {
                let exists = matches!(f, Formula::Exists(..));
                let mut acc = Ok(!exists);
                for d in self.carriers().carrier(ty)? {
                    asg.push(x, d, ty);
                    let v = self.formula(body, asg);
                    asg.pop();
                    acc = if exists { or(acc, v) } else { and(acc, v) };
                    if acc == Ok(exists) {
                        break;
                    }
                }
                acc
            }
            Formula::GuardC(_) | Formula::GuardI(_) => {
                let elaborated = self.instantiate(f, asg)?;
                self.formula(&elaborated, asg)
            }
        }
    }

    /// The explicit form of a guard wrapper under the current values of
    /// concept-typed variables.
    fn instantiate(&self, f: &Formula, asg: &Assignment) -> EResult<Formula> {
        let vocab = self.vocabulary();
        let mut ctx = TypingContext::initial(vocab);
        let mut instance = f.clone();
        for (x, d, ty) in asg.visible() {
            match d {
                DomainElement::Concept(s) if vocab.is_concept_type(ty) => {
                    instance = instance.substitute(x, &Term::Concept(s.clone()));
                }
                _ => ctx.push_var(x, ty),
            }
        }
        Ok(grounding::ground_in(&ctx, &instance, self.interp)?)
    }
}

/// Kleene disjunction: a true side decides; otherwise any failure
/// leaves the value undefined.
fn or(a: EResult<bool>, b: EResult<bool>) -> EResult<bool> {
    match (a, b) {
        (Ok(true), _) | (_, Ok(true)) => Ok(true),
        (Ok(false), Ok(false)) => Ok(false),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

fn and(a: EResult<bool>, b: EResult<bool>) -> EResult<bool> {
    match (a, b) {
        (Ok(false), _) | (_, Ok(false)) => Ok(false),
        (Ok(true), Ok(true)) => Ok(true),
        (Err(e), _) | (_, Err(e)) => Err(e),
    }
}

/// The value of a term or formula; formulas evaluate to truth values.
pub fn eval(model: &Model, expr: &Expr, asg: &Assignment) -> EResult<DomainElement> {
    match expr {
        Expr::Term(t) => model.eval_term(t, asg),
        Expr::Formula(f) => model.eval_formula(f, asg).map(DomainElement::Bool),
    }
}

/// `S ⊨ sentence`. Ill-typed sentences and invalid structures are refused.
pub fn satisfies(theory: &Theory, structure: &Structure, sentence: &Formula) -> EResult<bool> {
    let interp = grounding::build_intensional_interp(theory)?;
    let check = check_sentence_with(&interp, sentence)?;
    if let Err(e) = check.result {
        return Err(e.into());
    }
    let mut s = structure.clone();
    s.adopt_facts(&theory.concept_facts);
    let model = Model::new(&interp, &s).map_err(|r| EvalError::InvalidStructure(r.to_string()))?;
    model.holds(sentence)
}

//! Shared fixtures, generators and independent oracles for the integration
//! and acceptance tests.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use gosil::semantics::{DomainElement, FunctionGraph, Structure};
use gosil::syntax::{parse_formula, parse_theory, Formula, Term, Theory};
use gosil::vocabulary::{SymbolKind, Vocabulary};
use rand::seq::SliceRandom;
use rand::Rng;

pub const RUNNING_EXAMPLE: &str = include_str!("../../theories/running_example.gos");
pub const S0: &str = include_str!("../../theories/s0.str");

pub fn running_example() -> Theory {
    parse_theory(RUNNING_EXAMPLE).expect("the running example parses")
}

pub fn formula(theory: &Theory, src: &str) -> Formula {
    parse_formula(src, &theory.vocabulary, &[]).unwrap_or_else(|e| panic!("{src}: {e}"))
}

pub fn axiom(theory: &Theory, label: &str) -> Formula {
    theory.axiom(label).unwrap_or_else(|| panic!("no axiom {label}")).formula.clone()
}

pub const EQ1: &str = "!a[Animal]: makingSound(a) <=> (?c[Cat]: a = c & meow(c)) | (?d[Dog]: a = d & bark(d))";
pub const EQ2: &str = "!a[Animal]: makingSound(a) <=> (Cat(a) & meow(a)) | (Dog(a) & bark(a))";
pub const EQ3: &str = "!a[Animal]: (Cat(a) => meow(a)) & (Dog(a) => bark(a))";
pub const EQ4: &str = "!a[Animal]: makingSound(a) <=> ?k[Kind]: $(k)(a) & $(soundOfKind(k))(a)";
pub const EX3: &str = "?a[Animal]: Cat(a) & meow(a)";
pub const EX8: &str = "!a[Animal]: makingSound(a) <=> ?s[Sound]: $(s)(a)";
pub const EX9: &str = "!a[Animal]: makingSound(a) <=> ?s[Sound]: <<c: $(s)(a)>>";
pub const EX9_WRAPPED: &str = "!a[Animal]: makingSound(a) <=> <<c: meow(a)>> | <<c: bark(a)>>";
pub const EX10: &str = "!a[Animal]: <<i: meow(a)>> & <<i: bark(a)>>";
pub const EX10_SOUND: &str = "!a[Animal]: !s[Sound]: <<i: $(s)(a)>>";

fn e(i: usize) -> DomainElement {
    DomainElement::Plain(format!("e{i}"))
}

fn subset(items: &[DomainElement], mask: usize) -> Vec<DomainElement> {
    items.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d.clone()).collect()
}

/// Every structure over the running-example vocabulary with
/// `1 <= |Animal| <= max`, `age` constantly 0 and Nat bounded by 0.
/// Cat and Dog are arbitrary non-empty subsets of Animal.
pub fn running_example_structures(theory: &Theory, max: usize) -> Vec<Structure> {
    let mut out = Vec::new();
    for n in 1..=max {
        let animals: Vec<DomainElement> = (1..=n).map(e).collect();
        let full = 1usize << n;
        for cat_mask in 1..full {
            let cats = subset(&animals, cat_mask);
            for dog_mask in 1..full {
                let dogs = subset(&animals, dog_mask);
                for tom in &cats {
                    for meow_mask in 0..1usize << cats.len() {
                        for bark_mask in 0..1usize << dogs.len() {
                            for sound_mask in 0..full {
                                let mut s = Structure::new();
                                s.nat_bound = Some(0);
                                s.set_type("Animal", animals.clone());
                                s.set_type("Cat", cats.clone());
                                s.set_type("Dog", dogs.clone());
                                s.set_constant("tom", tom.clone());
                                s.set_predicate("meow", subset(&cats, meow_mask).into_iter().map(|d| vec![d]));
                                s.set_predicate("bark", subset(&dogs, bark_mask).into_iter().map(|d| vec![d]));
                                s.set_predicate(
                                    "makingSound",
                                    subset(&animals, sound_mask).into_iter().map(|d| vec![d]),
                                );
                                let mut age = FunctionGraph::new();
                                for a in &animals {
                                    age.insert(vec![a.clone()], DomainElement::Nat(0));
                                }
                                s.set_interp("age", age);
                                s.adopt_facts(&theory.concept_facts);
                                out.push(s);
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

/// A random type DAG: type `T{i}` gets up to three supertypes among the
/// types declared before it. Returns the vocabulary and its declared edges.
pub fn random_vocabulary<R: Rng>(rng: &mut R, max_types: usize) -> (Vocabulary, Vec<(String, String)>) {
    let mut v = Vocabulary::new();
    let mut names: Vec<String> = Vec::new();
    let mut edges = Vec::new();
    let count = rng.gen_range(1..=max_types);
    for i in 0..count {
        let name = format!("T{i}");
        let k = rng.gen_range(0..=names.len().min(3));
        let sups: Vec<String> = names.choose_multiple(rng, k).cloned().collect();
        let refs: Vec<&str> = sups.iter().map(String::as_str).collect();
        v.declare_type(&name, &refs, None).expect("fresh type names");
        edges.extend(sups.into_iter().map(|s| (name.clone(), s)));
        names.push(name);
    }
    (v, edges)
}

/// Reflexive-transitive closure of `edges` by breadth-first search, with
/// every type below `Universe`.
pub fn reaches(edges: &[(String, String)], from: &str, to: &str) -> bool {
    if from == to || to == "Universe" {
        return true;
    }
    let mut seen = BTreeSet::from([from.to_string()]);
    let mut queue = VecDeque::from([from.to_string()]);
    while let Some(t) = queue.pop_front() {
        for (_, sup) in edges.iter().filter(|(sub, _)| *sub == t) {
            if sup == to {
                return true;
            }
            if seen.insert(sup.clone()) {
                queue.push_back(sup.clone());
            }
        }
    }
    false
}

/// Random syntax over a vocabulary, respecting arities and variable scope
/// but not types.
pub struct SyntaxGen<'a> {
    predicates: Vec<(String, usize)>,
    functions: Vec<(String, usize)>,
    concepts: Vec<String>,
    types: Vec<String>,
    vocab: &'a Vocabulary,
}

const VARIABLES: [&str; 4] = ["x", "y", "z", "w"];

impl<'a> SyntaxGen<'a> {
    pub fn new(vocab: &'a Vocabulary) -> Self {
        let plain = |name: &str| name.chars().all(|c| c.is_alphanumeric() || c == '_');
        let mut predicates = Vec::new();
        let mut functions = Vec::new();
        for (name, sig, kind) in vocab.signatures() {
            if !plain(name) || kind == SymbolKind::Equality {
                continue;
            }
            if sig.result == "Bool" {
                predicates.push((name.to_string(), sig.arity()));
            } else {
                functions.push((name.to_string(), sig.arity()));
            }
        }
        SyntaxGen {
            predicates,
            functions,
            concepts: vocab.concept_universe(),
            types: vocab.types().map(|t| t.name.clone()).collect(),
            vocab,
        }
    }

    pub fn vocabulary(&self) -> &'a Vocabulary {
        self.vocab
    }

    pub fn formula<R: Rng>(&self, rng: &mut R, depth: usize, scope: &mut Vec<String>) -> Formula {
        let leaf = depth == 0 || rng.gen_bool(0.25);
        if leaf {
            return match rng.gen_range(0..5) {
                0 => Formula::True,
                1 => Formula::False,
                2 => Formula::eq(self.term(rng, 1, scope), self.term(rng, 1, scope)),
                3 => {
                    let n = rng.gen_range(0..3);
                    Formula::DerefAtom(self.term(rng, 1, scope), self.terms(rng, n, 1, scope))
                }
                _ => {
                    let (p, n) = self.predicates.choose(rng).unwrap().clone();
                    Formula::Atom(p, self.terms(rng, n, 1, scope))
                }
            };
        }
        let d = depth - 1;
        match rng.gen_range(0..9) {
            0 => Formula::not(self.formula(rng, d, scope)),
            1 => Formula::or(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            2 => Formula::and(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            3 => Formula::implies(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            4 => Formula::iff(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            5 | 6 => {
                let var = VARIABLES.choose(rng).unwrap().to_string();
                let ty = self.types.choose(rng).unwrap().clone();
                scope.push(var.clone());
                let body = self.formula(rng, d, scope);
                scope.pop();
                if rng.gen_bool(0.5) {
                    Formula::forall(&var, &ty, body)
                } else {
                    Formula::exists(&var, &ty, body)
                }
            }
            7 => Formula::GuardC(Box::new(self.formula(rng, d, scope))),
            _ => Formula::GuardI(Box::new(self.formula(rng, d, scope))),
        }
    }

    fn terms<R: Rng>(&self, rng: &mut R, n: usize, depth: usize, scope: &[String]) -> Vec<Term> {
        (0..n).map(|_| self.term(rng, depth, scope)).collect()
    }

    pub fn term<R: Rng>(&self, rng: &mut R, depth: usize, scope: &[String]) -> Term {
        let leaf = depth == 0 || rng.gen_bool(0.4);
        if leaf {
            return match rng.gen_range(0..5) {
                0 if !scope.is_empty() => Term::Var(scope.choose(rng).unwrap().clone()),
                1 => Term::Nat(rng.gen_range(0..1000)),
                2 => Term::ConceptRef(self.concepts.choose(rng).unwrap().clone()),
                3 => Term::Concept(self.concepts.choose(rng).unwrap().clone()),
                _ => match self.functions.iter().filter(|(_, n)| *n == 0).collect::<Vec<_>>().choose(rng) {
                    Some((f, _)) => Term::Apply(f.clone(), Vec::new()),
                    None => Term::Nat(0),
                },
            };
        }
        if rng.gen_bool(0.2) {
            let head = self.term(rng, depth - 1, scope);
            let n = rng.gen_range(0..3);
            let args = self.terms(rng, n, depth - 1, scope);
            return Term::Deref(Box::new(head), args);
        }
        let (f, n) = self.functions.choose(rng).unwrap().clone();
        Term::Apply(f, self.terms(rng, n, depth - 1, scope))
    }
}

/// Random sentences over the running-example vocabulary that are meant to
/// be well-typed: arguments conform to the expected type, except that
/// `meow`, `bark` and dereferences inside a guard wrapper may take any
/// Animal variable bound outside the wrapper.
pub struct TypedGen {
    counter: usize,
}

#[derive(Clone)]
struct Scope {
    vars: Vec<(String, String)>,
    /// Length of `vars` at the innermost enclosing wrapper, if any.
    wrapper: Option<usize>,
}

const BELOW: [(&str, &str); 6] =
    [("Cat", "Animal"), ("Dog", "Animal"), ("Sound", "Concept"), ("Kind", "Concept"), ("Animal", "Animal"), ("Nat", "Nat")];

fn conforms(sub: &str, sup: &str) -> bool {
    sub == sup || sup == "Universe" || BELOW.iter().any(|(a, b)| *a == sub && *b == sup)
}

impl TypedGen {
    pub fn new() -> Self {
        TypedGen { counter: 0 }
    }

    pub fn sentence<R: Rng>(&mut self, rng: &mut R, depth: usize) -> Formula {
        self.formula(rng, depth, &Scope { vars: Vec::new(), wrapper: None })
    }

    fn fresh(&mut self) -> String {
        self.counter += 1;
        format!("v{}", self.counter)
    }

    fn term<R: Rng>(&self, rng: &mut R, expected: &str, scope: &Scope, depth: usize) -> Term {
        let mut options: Vec<Term> = scope
            .vars
            .iter()
            .filter(|(_, t)| conforms(t, expected))
            .map(|(x, _)| Term::var(x))
            .collect();
        if conforms("Cat", expected) {
            options.push(Term::constant("tom"));
        }
        if conforms("Nat", expected) {
            options.push(Term::Nat(rng.gen_range(0..3)));
            if depth > 0 {
                let animal = self.term(rng, "Animal", scope, depth - 1);
                options.push(Term::app("age", vec![animal]));
                let (a, b) = (self.term(rng, "Nat", scope, depth - 1), self.term(rng, "Nat", scope, depth - 1));
                options.push(Term::app(["+", "-", "*"].choose(rng).unwrap(), vec![a, b]));
            }
        }
        if conforms("Sound", expected) {
            options.push(Term::ConceptRef(["meow", "bark"].choose(rng).unwrap().to_string()));
            if depth > 0 {
                let k = self.term(rng, "Kind", scope, depth - 1);
                options.push(Term::app("soundOfKind", vec![k]));
            }
        }
        if conforms("Kind", expected) {
            options.push(Term::ConceptRef(["Cat", "Dog"].choose(rng).unwrap().to_string()));
        }
        options.choose(rng).cloned().unwrap_or(Term::Nat(0))
    }

    /// An argument for a `Cat`/`Dog` position: inside a wrapper, any Animal
    /// variable bound outside it.
    fn loose<R: Rng>(&self, rng: &mut R, expected: &str, scope: &Scope) -> Term {
        if let Some(k) = scope.wrapper {
            let outer: Vec<&(String, String)> = scope.vars[..k].iter().filter(|(_, t)| conforms(t, "Animal")).collect();
            if !outer.is_empty() && rng.gen_bool(0.7) {
                return Term::var(&outer.choose(rng).unwrap().0);
            }
        }
        self.term(rng, expected, scope, 1)
    }

    fn formula<R: Rng>(&mut self, rng: &mut R, depth: usize, scope: &Scope) -> Formula {
        if depth == 0 || rng.gen_bool(0.2) {
            return self.leaf(rng, scope);
        }
        let d = depth - 1;
        match rng.gen_range(0..10) {
            0 => Formula::not(self.formula(rng, d, scope)),
            1 => Formula::or(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            2 => Formula::and(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            3 => Formula::implies(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            4 => Formula::iff(self.formula(rng, d, scope), self.formula(rng, d, scope)),
            5..=7 => {
                let x = self.fresh();
                let ty = ["Animal", "Animal", "Cat", "Dog", "Nat", "Sound", "Kind"].choose(rng).unwrap().to_string();
                let mut inner = scope.clone();
                inner.vars.push((x.clone(), ty.clone()));
                let body = self.formula(rng, d, &inner);
                if rng.gen_bool(0.5) {
                    Formula::forall(&x, &ty, body)
                } else {
                    Formula::exists(&x, &ty, body)
                }
            }
            _ => {
                let inner = Scope { vars: scope.vars.clone(), wrapper: Some(scope.vars.len()) };
                let body = self.formula(rng, d, &inner);
                if rng.gen_bool(0.5) {
                    Formula::GuardC(Box::new(body))
                } else {
                    Formula::GuardI(Box::new(body))
                }
            }
        }
    }

    fn leaf<R: Rng>(&mut self, rng: &mut R, scope: &Scope) -> Formula {
        let concept_vars: Vec<&(String, String)> =
            scope.vars.iter().filter(|(_, t)| t == "Sound" || t == "Kind").collect();
        match rng.gen_range(0..9) {
            0 => [Formula::True, Formula::False].choose(rng).unwrap().clone(),
            1 => Formula::atom("meow", vec![self.loose(rng, "Cat", scope)]),
            2 => Formula::atom("bark", vec![self.loose(rng, "Dog", scope)]),
            3 => Formula::atom("makingSound", vec![self.term(rng, "Animal", scope, 1)]),
            4 => {
                let ty = ["Animal", "Cat", "Dog", "Sound"].choose(rng).unwrap();
                Formula::atom(ty, vec![self.term(rng, "Universe", scope, 1)])
            }
            5 => {
                let ty = ["Animal", "Nat", "Sound", "Kind"].choose(rng).unwrap();
                Formula::eq(self.term(rng, ty, scope, 2), self.term(rng, ty, scope, 2))
            }
            _ if !concept_vars.is_empty() => {
                let (s, ty) = (*concept_vars.choose(rng).unwrap()).clone();
                let arg = if ty == "Kind" { self.term(rng, "Universe", scope, 1) } else { self.loose(rng, "Animal", scope) };
                Formula::DerefAtom(Term::var(&s), vec![arg])
            }
            _ => Formula::atom("makingSound", vec![Term::constant("tom")]),
        }
    }
}

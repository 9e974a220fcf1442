use crate::syntax::Term;
use crate::vocabulary::{Signature, Vocabulary};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Entry {
    /// Keyed by the vocabulary key (`=_T` for equality instances).
    Symbol(String, Signature),
    Var(String, String),
    Term(Term, String),
}

/// An ordered typing context; later entries shadow earlier ones.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TypingContext {
    entries: Vec<Entry>,
}

impl TypingContext {
    pub fn empty() -> Self {
        TypingContext::default()
    }

    /// One symbol entry per vocabulary symbol, built-ins included.
    pub fn initial(vocab: &Vocabulary) -> Self {
        let entries = vocab.signatures().map(|(key, sig, _)| Entry::Symbol(key.to_string(), sig.clone())).collect();
        TypingContext { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn truncate(&mut self, len: usize) {
        self.entries.truncate(len);
    }

    pub fn push_var(&mut self, name: &str, ty: &str) {
        self.entries.push(Entry::Var(name.to_string(), ty.to_string()));
    }

    pub fn push_term(&mut self, term: Term, ty: &str) {
        self.entries.push(Entry::Term(term, ty.to_string()));
    }

    pub fn with_var(mut self, name: &str, ty: &str) -> Self {
        self.push_var(name, ty);
        self
    }

    pub fn symbol(&self, key: &str) -> Option<&Signature> {
        self.entries.iter().rev().find_map(|e| match e {
            Entry::Symbol(k, sig) if k == key => Some(sig),
            _ => None,
        })
    }

    /// The annotated type of `term`. A variable entry for a variable that
    /// occurs in `term` hides any older entry for the whole term.
    pub fn lookup(&self, term: &Term) -> Option<&str> {
        for entry in self.entries.iter().rev() {
            match entry {
                Entry::Term(t, ty) if t == term => return Some(ty),
                Entry::Var(x, ty) => {
                    if matches!(term, Term::Var(v) if v == x) {
                        return Some(ty);
                    }
                    if term.mentions(x) {
                        return None;
                    }
                }
                _ => {}
            }
        }
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_theory;

    #[test]
    fn initial_context_holds_signatures() {
        let v = parse_theory("type Animal\ntype Cat <: Animal\npred meow: Cat").unwrap().vocabulary;
        let ctx = TypingContext::initial(&v);
        assert_eq!(ctx.symbol("meow").unwrap().to_string(), "meow : Cat -> Bool");
        assert_eq!(ctx.symbol("Cat").unwrap().to_string(), "Cat : Universe -> Bool");
        assert!(ctx.symbol("g").is_none());
        let builtin_only = TypingContext::initial(&Vocabulary::new());
        assert!(builtin_only.symbol("+").is_some());
        assert!(builtin_only.entries().iter().all(|e| matches!(e, Entry::Symbol(..))));
    }

    #[test]
    fn shadowing_and_capture() {
        let a = Term::var("a");
        let mut ctx = TypingContext::empty().with_var("a", "Animal");
        ctx.push_term(a.clone(), "Cat");
        assert_eq!(ctx.lookup(&a), Some("Cat"));
        let age_a = Term::app("age", vec![a.clone()]);
        ctx.push_term(age_a.clone(), "Nat");
        ctx.push_var("a", "Dog");
        assert_eq!(ctx.lookup(&a), Some("Dog"));
        assert_eq!(ctx.lookup(&age_a), None);
        ctx.truncate(2);
        assert_eq!(ctx.lookup(&a), Some("Cat"));
    }
}

//! Recursive-descent parser for theories and formulas.
//!
//! Statements end at a newline or `;`. Line breaks inside brackets or after
//! an operator do not end a statement. Declarations may refer to types and
//! symbols declared later in the same file; axioms and `define` facts are
//! parsed after the whole vocabulary is known.

use serde::Serialize;
use thiserror::Error;

use crate::span::Span;
use crate::vocabulary::{Declaration, VocabError, Vocabulary, BOOL};

use super::lexer::{tokenize, Token, TokenKind};
use super::{Axiom, ConceptFact, Formula, Term, Theory};

const MAX_DEPTH: usize = 100;
const RESERVED: [&str; 2] = ["true", "false"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ParseErrorKind {
    Syntax,
    Arity,
    UnknownIdentifier,
    UnboundVariable,
    InvalidDefine,
    Vocabulary(VocabError),
}

impl ParseErrorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ParseErrorKind::Syntax => "SyntaxError",
            ParseErrorKind::Arity => "ArityError",
            ParseErrorKind::UnknownIdentifier => "UnknownIdentifier",
            ParseErrorKind::UnboundVariable => "UnboundVariable",
            ParseErrorKind::InvalidDefine => "InvalidDefine",
            ParseErrorKind::Vocabulary(e) => e.kind_name(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub span: Span,
    pub message: String,
}

impl ParseError {
    pub fn new(kind: ParseErrorKind, span: Span, message: impl Into<String>) -> Self {
        ParseError { kind, span, message: message.into() }
    }
}

type PResult<T> = Result<T, ParseError>;

/// Parse a complete theory: declarations, axioms and concept facts.
pub fn parse_theory(text: &str) -> PResult<Theory> {
    let tokens = tokenize(text)?;
    let mut decls = Vec::new();
    let mut axioms: Vec<&[Token]> = Vec::new();
    let mut defines: Vec<&[Token]> = Vec::new();

    for stmt in statements(&tokens) {
        let TokenKind::Ident(keyword) = &stmt[0].kind else {
            return Err(unexpected(&stmt[0], "a declaration keyword"));
        };
        match keyword.as_str() {
            "type" | "func" | "pred" | "const" => decls.push(parse_declaration(stmt)?),
            "axiom" => axioms.push(stmt),
            "define" => defines.push(stmt),
            _ => return Err(unexpected(&stmt[0], "`type`, `func`, `pred`, `const`, `axiom` or `define`")),
        }
    }

    let (vocabulary, report) = Vocabulary::from_declarations(&decls);
    if let Some(v) = report.violations.first() {
        let span = v.location.unwrap_or_default();
        return Err(ParseError::new(ParseErrorKind::Vocabulary(v.error.clone()), span, v.error.to_string()));
    }

    let mut parsed_axioms: Vec<Axiom> = Vec::new();
    for stmt in axioms {
        let mut p = Parser::new(stmt, &vocabulary);
        let span = p.advance().span;
        let (label, label_span) = p.ident("an axiom label")?;
        if parsed_axioms.iter().any(|a| a.label == label) {
            return Err(ParseError::new(ParseErrorKind::Syntax, label_span, format!("duplicate axiom label `{label}`")));
        }
        p.expect(TokenKind::Colon)?;
        let formula = p.formula()?;
        p.finish()?;
        parsed_axioms.push(Axiom { label, formula, span });
    }

    let mut concept_facts = Vec::new();
    for stmt in defines {
        concept_facts.push(parse_define(stmt, &vocabulary)?);
    }

    Ok(Theory { vocabulary, axioms: parsed_axioms, concept_facts })
}

/// Parse a formula over `vocab`; its free variables must be listed in
/// `free_vars` as `(name, type)` pairs.
pub fn parse_formula(text: &str, vocab: &Vocabulary, free_vars: &[(&str, &str)]) -> PResult<Formula> {
    let tokens: Vec<Token> = tokenize(text)?.into_iter().filter(|t| t.kind != TokenKind::Newline).collect();
    let mut p = Parser::new(&tokens, vocab);
    for (name, ty) in free_vars {
        if !vocab.has_type(ty) {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, Span::new(1, 1), format!("unknown type `{ty}`")));
        }
        p.scope.push(name.to_string());
    }
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

pub fn parse_term(text: &str, vocab: &Vocabulary, free_vars: &[(&str, &str)]) -> PResult<Term> {
    let tokens: Vec<Token> = tokenize(text)?.into_iter().filter(|t| t.kind != TokenKind::Newline).collect();
    let mut p = Parser::new(&tokens, vocab);
    p.scope.extend(free_vars.iter().map(|(n, _)| n.to_string()));
    let t = p.term()?;
    p.finish()?;
    Ok(t)
}

fn statements(tokens: &[Token]) -> Vec<&[Token]> {
    tokens
        .split(|t| matches!(t.kind, TokenKind::Newline | TokenKind::Semi | TokenKind::Eof))
        .filter(|s| !s.is_empty())
        .collect()
}

fn unexpected(tok: &Token, wanted: &str) -> ParseError {
    ParseError::new(ParseErrorKind::Syntax, tok.span, format!("expected {wanted}, found {}", tok.kind.describe()))
}

/// Cursor over one statement's tokens; running off the end yields a
/// synthetic end-of-input token.
struct Cursor<'t> {
    tokens: &'t [Token],
    pos: usize,
    end: Token,
}

impl<'t> Cursor<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        let end_span = match tokens.last() {
            Some(t) if t.kind == TokenKind::Eof => t.span,
            Some(t) => Span::new(t.span.line, t.span.column + 1),
            None => Span::new(1, 1),
        };
        Cursor { tokens, pos: 0, end: Token { kind: TokenKind::Eof, span: end_span } }
    }

    fn peek(&self) -> &Token {
        self.tokens.get(self.pos).unwrap_or(&self.end)
    }

    fn peek_at(&self, offset: usize) -> &Token {
        self.tokens.get(self.pos + offset).unwrap_or(&self.end)
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if &self.peek().kind == kind {
            self.advance();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.peek().kind == kind {
            Ok(self.advance())
        } else {
            Err(unexpected(self.peek(), &kind.describe()))
        }
    }

    fn ident(&mut self, wanted: &str) -> PResult<(String, Span)> {
        match &self.peek().kind {
            TokenKind::Ident(name) if !RESERVED.contains(&name.as_str()) => {
                let name = name.clone();
                Ok((name, self.advance().span))
            }
            _ => Err(unexpected(self.peek(), wanted)),
        }
    }

    fn finish(&self) -> PResult<()> {
        match self.peek().kind {
            TokenKind::Eof | TokenKind::Newline | TokenKind::Semi => Ok(()),
            _ => Err(unexpected(self.peek(), "end of statement")),
        }
    }
}

fn parse_declaration(stmt: &[Token]) -> PResult<Declaration> {
    let mut c = Cursor::new(stmt);
    let head = c.advance();
    let TokenKind::Ident(keyword) = &head.kind else { unreachable!("checked by caller") };
    let span = Some(head.span);
    let (name, _) = c.ident("a name")?;
    let decl = match keyword.as_str() {
        "type" => {
            let mut supertypes = Vec::new();
            if c.eat(&TokenKind::Subtype) {
                loop {
                    supertypes.push(c.ident("a supertype")?.0);
                    if !c.eat(&TokenKind::Comma) {
                        break;
                    }
                }
            }
            let extension = if c.eat(&TokenKind::Assign) { Some(extension_members(&mut c)?) } else { None };
            Declaration::Type { name, supertypes, extension, span }
        }
        "func" => {
            c.expect(TokenKind::Colon)?;
            let args = argument_types(&mut c)?;
            c.expect(TokenKind::Arrow)?;
            let (result, _) = c.ident("a result type")?;
            Declaration::Symbol { name, args, result, span }
        }
        "pred" => {
            let args = if c.eat(&TokenKind::Colon) { argument_types(&mut c)? } else { Vec::new() };
            if c.eat(&TokenKind::Arrow) {
                let (result, rspan) = c.ident("`Bool`")?;
                if result != BOOL {
                    return Err(ParseError::new(ParseErrorKind::Syntax, rspan, "a predicate must return `Bool`"));
                }
            }
            Declaration::Symbol { name, args, result: BOOL.to_string(), span }
        }
        "const" => {
            c.expect(TokenKind::Colon)?;
            let (result, _) = c.ident("a type")?;
            Declaration::Symbol { name, args: Vec::new(), result, span }
        }
        _ => unreachable!("checked by caller"),
    };
    c.finish()?;
    Ok(decl)
}

fn argument_types(c: &mut Cursor) -> PResult<Vec<String>> {
    if c.peek().kind == TokenKind::LParen && c.peek_at(1).kind == TokenKind::RParen {
        c.advance();
        c.advance();
        return Ok(Vec::new());
    }
    let mut args = vec![c.ident("an argument type")?.0];
    while c.eat(&TokenKind::Star) {
        args.push(c.ident("an argument type")?.0);
    }
    Ok(args)
}

fn extension_members(c: &mut Cursor) -> PResult<Vec<String>> {
    c.expect(TokenKind::LBrace)?;
    let mut members = Vec::new();
    if c.eat(&TokenKind::RBrace) {
        return Ok(members);
    }
    loop {
        members.push(concept_name(c)?.0);
        if c.eat(&TokenKind::RBrace) {
            return Ok(members);
        }
        c.expect(TokenKind::Comma)?;
    }
}

/// `` `s ``, `` `(s) `` or a bare `s`.
fn concept_name(c: &mut Cursor) -> PResult<(String, Span)> {
    if c.eat(&TokenKind::Backtick) {
        if c.eat(&TokenKind::LParen) {
            let name = c.ident("a symbol")?;
            c.expect(TokenKind::RParen)?;
            return Ok(name);
        }
        return c.ident("a symbol");
    }
    c.ident("a concept reference")
}

fn parse_define(stmt: &[Token], vocab: &Vocabulary) -> PResult<ConceptFact> {
    let mut c = Cursor::new(stmt);
    let span = c.advance().span;
    let (function, fspan) = c.ident("a function name")?;
    let Some(sig) = vocab.user_symbols().find(|s| s.name == function) else {
        return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, fspan, format!("unknown function `{function}`")));
    };
    if !vocab.is_concept_type(&sig.result) {
        return Err(ParseError::new(
            ParseErrorKind::InvalidDefine,
            fspan,
            format!("`{function}` returns {}, which is not a concept type", sig.result),
        ));
    }
    let mut args = Vec::new();
    if c.eat(&TokenKind::LParen) && !c.eat(&TokenKind::RParen) {
        loop {
            args.push(defined_concept(&mut c, vocab)?);
            if c.eat(&TokenKind::RParen) {
                break;
            }
            c.expect(TokenKind::Comma)?;
        }
    }
    if args.len() != sig.arity() {
        return Err(ParseError::new(
            ParseErrorKind::Arity,
            fspan,
            format!("`{function}` expects {} arguments, found {}", sig.arity(), args.len()),
        ));
    }
    c.expect(TokenKind::Eq)?;
    let value = defined_concept(&mut c, vocab)?;
    c.finish()?;
    Ok(ConceptFact { function, args, value, span })
}

fn defined_concept(c: &mut Cursor, vocab: &Vocabulary) -> PResult<String> {
    if !matches!(c.peek().kind, TokenKind::Backtick | TokenKind::At) {
        return Err(ParseError::new(
            ParseErrorKind::InvalidDefine,
            c.peek().span,
            "arguments and values of `define` must be concept references",
        ));
    }
    let (name, span) = if c.eat(&TokenKind::At) { c.ident("a symbol")? } else { concept_name(c)? };
    if !vocab.is_concept(&name) {
        return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, span, format!("unknown symbol `{name}`")));
    }
    Ok(name)
}

struct Parser<'t, 'v> {
    c: Cursor<'t>,
    vocab: &'v Vocabulary,
    scope: Vec<String>,
    depth: usize,
}

impl<'t, 'v> std::ops::Deref for Parser<'t, 'v> {
    type Target = Cursor<'t>;
    fn deref(&self) -> &Cursor<'t> {
        &self.c
    }
}

impl<'t, 'v> std::ops::DerefMut for Parser<'t, 'v> {
    fn deref_mut(&mut self) -> &mut Cursor<'t> {
        &mut self.c
    }
}

impl<'t, 'v> Parser<'t, 'v> {
    fn new(tokens: &'t [Token], vocab: &'v Vocabulary) -> Self {
        Parser { c: Cursor::new(tokens), vocab, scope: Vec::new(), depth: 0 }
    }

    fn enter(&mut self) -> PResult<()> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(ParseError::new(ParseErrorKind::Syntax, self.peek().span, "expression nested too deeply"));
        }
        Ok(())
    }

    fn formula(&mut self) -> PResult<Formula> {
        self.enter()?;
        let f = self.iff();
        self.depth -= 1;
        f
    }

    fn iff(&mut self) -> PResult<Formula> {
        let mut lhs = self.implication()?;
        while self.eat(&TokenKind::Iff) {
            let rhs = self.implication()?;
            lhs = Formula::iff(lhs, rhs);
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let mut items = vec![self.disjunction()?];
        while self.eat(&TokenKind::Implies) {
            items.push(self.disjunction()?);
        }
        Ok(fold_right(items, Formula::implies))
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut items = vec![self.conjunction()?];
        while self.eat(&TokenKind::Pipe) {
            items.push(self.conjunction()?);
        }
        Ok(fold_right(items, Formula::or))
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut items = vec![self.unary()?];
        while self.eat(&TokenKind::Amp) {
            items.push(self.unary()?);
        }
        Ok(fold_right(items, Formula::and))
    }

    fn unary(&mut self) -> PResult<Formula> {
        self.enter()?;
        let result = match self.peek().kind {
            TokenKind::Tilde => {
                self.advance();
                self.unary().map(Formula::not)
            }
            TokenKind::Bang | TokenKind::Question => self.quantifier(),
            _ => self.primary(),
        };
        self.depth -= 1;
        result
    }

    fn quantifier(&mut self) -> PResult<Formula> {
        let universal = self.advance().kind == TokenKind::Bang;
        let (var, _) = self.ident("a variable")?;
        self.expect(TokenKind::LBracket)?;
        let (ty, ty_span) = self.ident("a type")?;
        if !self.vocab.has_type(&ty) {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, ty_span, format!("unknown type `{ty}`")));
        }
        self.expect(TokenKind::RBracket)?;
        self.expect(TokenKind::Colon)?;
        self.scope.push(var.clone());
        let body = self.formula();
        self.scope.pop();
        let body = body?;
        Ok(if universal { Formula::forall(&var, &ty, body) } else { Formula::exists(&var, &ty, body) })
    }

    fn primary(&mut self) -> PResult<Formula> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Ident(w) if w == "true" => {
                self.advance();
                Ok(Formula::True)
            }
            TokenKind::Ident(w) if w == "false" => {
                self.advance();
                Ok(Formula::False)
            }
            TokenKind::GuardOpen => self.guard(),
            TokenKind::LParen => {
                if let Some(eq) = self.try_equality() {
                    return Ok(eq);
                }
                self.advance();
                let f = self.formula()?;
                self.expect(TokenKind::RParen)?;
                Ok(f)
            }
            TokenKind::Dollar => {
                if let Some(eq) = self.try_equality() {
                    return Ok(eq);
                }
                let (head, args) = self.dereference()?;
                Ok(Formula::DerefAtom(head, args))
            }
            TokenKind::Ident(_) => {
                if let Some(eq) = self.try_equality() {
                    return Ok(eq);
                }
                self.atom()
            }
            TokenKind::Num(_) | TokenKind::Backtick | TokenKind::At => {
                let lhs = self.term()?;
                self.expect(TokenKind::Eq)?;
                let rhs = self.term()?;
                Ok(Formula::eq(lhs, rhs))
            }
            _ => Err(unexpected(&tok, "a formula")),
        }
    }

    /// `t = u`, if the upcoming tokens form one; otherwise rewinds.
    fn try_equality(&mut self) -> Option<Formula> {
        let saved = (self.c.pos, self.depth);
        if let Ok(lhs) = self.term() {
            if self.eat(&TokenKind::Eq) {
                if let Ok(rhs) = self.term() {
                    return Some(Formula::eq(lhs, rhs));
                }
            }
        }
        (self.c.pos, self.depth) = saved;
        None
    }

    fn guard(&mut self) -> PResult<Formula> {
        self.advance();
        let (mode, span) = self.ident("`c` or `i`")?;
        self.expect(TokenKind::Colon)?;
        let body = self.formula()?;
        self.expect(TokenKind::GuardClose)?;
        match mode.as_str() {
            "c" => Ok(Formula::GuardC(Box::new(body))),
            "i" => Ok(Formula::GuardI(Box::new(body))),
            _ => Err(ParseError::new(ParseErrorKind::Syntax, span, "guard mode must be `c` or `i`")),
        }
    }

    fn atom(&mut self) -> PResult<Formula> {
        let (name, span) = self.ident("a predicate")?;
        if self.scope.contains(&name) && self.peek().kind != TokenKind::LParen {
            return Err(ParseError::new(
                ParseErrorKind::Syntax,
                span,
                format!("variable `{name}` used where a formula is expected"),
            ));
        }
        let Some(sig) = self.vocab.signature(&name) else {
            return Err(ParseError::new(ParseErrorKind::UnknownIdentifier, span, format!("unknown predicate `{name}`")));
        };
        let arity = sig.arity();
        let args = if self.peek().kind == TokenKind::LParen { self.arguments()? } else { Vec::new() };
        check_arity(&name, arity, args.len(), span)?;
        Ok(Formula::Atom(name, args))
    }

    fn arguments(&mut self) -> PResult<Vec<Term>> {
        self.expect(TokenKind::LParen)?;
        let mut args = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.term()?);
            if self.eat(&TokenKind::RParen) {
                return Ok(args);
            }
            let comma = self.expect(TokenKind::Comma)?;
            if matches!(self.peek().kind, TokenKind::RParen | TokenKind::Eof | TokenKind::Newline | TokenKind::Semi) {
                return Err(ParseError::new(ParseErrorKind::Syntax, comma.span, "dangling `,` in argument list"));
            }
        }
    }

    fn dereference(&mut self) -> PResult<(Term, Vec<Term>)> {
        self.expect(TokenKind::Dollar)?;
        self.expect(TokenKind::LParen)?;
        let head = self.term()?;
        self.expect(TokenKind::RParen)?;
        let args = self.arguments()?;
        Ok((head, args))
    }

    fn term(&mut self) -> PResult<Term> {
        self.enter()?;
        let t = self.sum();
        self.depth -= 1;
        t
    }

    fn sum(&mut self) -> PResult<Term> {
        let mut lhs = self.product()?;
        loop {
            let op = match self.peek().kind {
                TokenKind::Plus => "+",
                TokenKind::Minus => "-",
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.product()?;
            lhs = Term::app(op, vec![lhs, rhs]);
        }
    }

    fn product(&mut self) -> PResult<Term> {
        let mut lhs = self.term_primary()?;
        while self.eat(&TokenKind::Star) {
            let rhs = self.term_primary()?;
            lhs = Term::app("*", vec![lhs, rhs]);
        }
        Ok(lhs)
    }

    fn term_primary(&mut self) -> PResult<Term> {
        let tok = self.peek().clone();
        match &tok.kind {
            TokenKind::Num(n) => {
                self.advance();
                Ok(Term::Nat(*n))
            }
            TokenKind::Backtick | TokenKind::At => {
                let object = self.advance().kind == TokenKind::At;
                let (name, span) = if object {
                    self.ident("a symbol")?
                } else {
                    self.c.pos -= 1;
                    concept_name(&mut self.c)?
                };
                if !self.vocab.is_concept(&name) {
                    return Err(ParseError::new(
                        ParseErrorKind::UnknownIdentifier,
                        span,
                        format!("`{name}` is not a declared symbol or type"),
                    ));
                }
                Ok(if object { Term::Concept(name) } else { Term::ConceptRef(name) })
            }
            TokenKind::Dollar => {
                let (head, args) = self.dereference()?;
                Ok(Term::Deref(Box::new(head), args))
            }
            TokenKind::LParen => {
                self.advance();
                let t = self.term()?;
                self.expect(TokenKind::RParen)?;
                Ok(t)
            }
            TokenKind::Ident(_) => {
                let (name, span) = self.ident("a term")?;
                if self.peek().kind == TokenKind::LParen {
                    let Some(sig) = self.vocab.signature(&name) else {
                        return Err(ParseError::new(
                            ParseErrorKind::UnknownIdentifier,
                            span,
                            format!("unknown function `{name}`"),
                        ));
                    };
                    let arity = sig.arity();
                    let args = self.arguments()?;
                    check_arity(&name, arity, args.len(), span)?;
                    return Ok(Term::Apply(name, args));
                }
                if self.scope.contains(&name) {
                    return Ok(Term::Var(name));
                }
                match self.vocab.signature(&name) {
                    Some(sig) => {
                        check_arity(&name, sig.arity(), 0, span)?;
                        Ok(Term::Apply(name, Vec::new()))
                    }
                    None => Err(ParseError::new(
                        ParseErrorKind::UnboundVariable,
                        span,
                        format!("`{name}` is neither a bound variable nor a declared symbol"),
                    )),
                }
            }
            _ => Err(unexpected(&tok, "a term")),
        }
    }
}

fn fold_right(mut items: Vec<Formula>, join: fn(Formula, Formula) -> Formula) -> Formula {
    let mut acc = items.pop().expect("at least one operand");
    while let Some(next) = items.pop() {
        acc = join(next, acc);
    }
    acc
}

fn check_arity(name: &str, expected: usize, found: usize, span: Span) -> PResult<()> {
    if expected != found {
        return Err(ParseError::new(
            ParseErrorKind::Arity,
            span,
            format!("`{name}` expects {expected} arguments, found {found}"),
        ));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vocabulary::{CONCEPT, NAT};

    const DECLS: &str = "
type Animal
type Cat <: Animal
type Dog <: Animal
func age: Animal -> Nat
const tom: Cat
pred bark: Dog
pred meow: Cat
";

    fn vocab() -> Vocabulary {
        parse_theory(DECLS).unwrap().vocabulary
    }

    #[test]
    fn declarations() {
        let v = vocab();
        assert_eq!(v.user_types().count(), 3);
        assert_eq!(v.user_symbols().count(), 4);
        assert!(v.conforms("Cat", "Animal"));
        assert_eq!(v.signature("age").unwrap().result, NAT);
        assert_eq!(v.signature("tom").unwrap().arity(), 0);
        assert!(v.signature("meow").unwrap().is_predicate());
    }

    #[test]
    fn guarded_existential_axiom() {
        let t = parse_theory(&format!("{DECLS}axiom a1: ?a[Animal]: Cat(a) & meow(a)")).unwrap();
        let a = Term::var("a");
        assert_eq!(
            t.axioms[0].formula,
            Formula::exists(
                "a",
                "Animal",
                Formula::and(Formula::atom("Cat", vec![a.clone()]), Formula::atom("meow", vec![a]))
            )
        );
        assert_eq!(t.axioms[0].label, "a1");
    }

    #[test]
    fn dangling_comma() {
        let err = parse_theory(&format!("{DECLS}axiom bad: meow(tom,")).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::Syntax);
        assert_eq!(err.span, Span::new(9, 20));
    }

    #[test]
    fn terms_and_dereferences() {
        let v = vocab();
        assert_eq!(parse_term("age(tom)", &v, &[]).unwrap(), Term::app("age", vec![Term::constant("tom")]));
        assert_eq!(
            parse_term("$(`tom)()", &v, &[]).unwrap(),
            Term::Deref(Box::new(Term::ConceptRef("tom".into())), vec![])
        );
        assert_eq!(
            parse_formula("meow($(`(tom))())", &v, &[]).unwrap(),
            Formula::atom("meow", vec![Term::Deref(Box::new(Term::ConceptRef("tom".into())), vec![])])
        );
        assert_eq!(
            parse_formula("<<c: meow(a)>>", &v, &[("a", "Animal")]).unwrap(),
            Formula::GuardC(Box::new(Formula::atom("meow", vec![Term::var("a")])))
        );
    }

    #[test]
    fn equalities_and_arithmetic() {
        let v = vocab();
        let f = parse_formula("age(tom) + 1 * 2 = 3", &v, &[]).unwrap();
        assert_eq!(
            f,
            Formula::eq(
                Term::app("+", vec![Term::app("age", vec![Term::constant("tom")]), Term::app("*", vec![Term::Nat(1), Term::Nat(2)])]),
                Term::Nat(3)
            )
        );
        let g = parse_formula("(a = tom) & (meow(tom))", &v, &[("a", "Animal")]).unwrap();
        assert!(matches!(g, Formula::And(..)));
    }

    #[test]
    fn precedence_and_associativity() {
        let v = parse_theory("pred p\npred q\npred r").unwrap().vocabulary;
        let [p, q, r] = ["p", "q", "r"].map(|n| Formula::atom(n, vec![]));
        assert_eq!(
            parse_formula("~p & q | r => p <=> q", &v, &[]).unwrap(),
            Formula::iff(
                Formula::implies(Formula::or(Formula::and(Formula::not(p.clone()), q.clone()), r.clone()), p.clone()),
                q.clone()
            )
        );
        assert_eq!(
            parse_formula("p => q => r", &v, &[]).unwrap(),
            Formula::implies(p.clone(), Formula::implies(q.clone(), r.clone()))
        );
        assert_eq!(
            parse_formula("p & q & r", &v, &[]).unwrap(),
            Formula::and(p.clone(), Formula::and(q.clone(), r.clone()))
        );
    }

    #[test]
    fn errors() {
        let v = vocab();
        let kind = |s: &str| parse_formula(s, &v, &[]).unwrap_err().kind;
        assert_eq!(kind("meow(tom, tom)"), ParseErrorKind::Arity);
        assert_eq!(kind("purr(tom)"), ParseErrorKind::UnknownIdentifier);
        assert_eq!(kind("meow(x)"), ParseErrorKind::UnboundVariable);
        assert_eq!(kind("?x[Mouse]: true"), ParseErrorKind::UnknownIdentifier);
        assert_eq!(kind("meow(tom"), ParseErrorKind::Syntax);
        assert_eq!(kind("<<x: true>>"), ParseErrorKind::Syntax);
        assert_eq!(kind(&"(".repeat(500)), ParseErrorKind::Syntax);
    }

    #[test]
    fn concept_declarations_and_facts() {
        let src = format!(
            "{DECLS}
type Sound <: Concept := {{`meow, `(bark)}}
type Kind <: Concept := {{`Cat, `Dog}}
func soundOfKind: Kind -> Sound
define soundOfKind(`Cat) = `meow; define soundOfKind(`(Dog)) = `bark
"
        );
        let t = parse_theory(&src).unwrap();
        assert_eq!(t.vocabulary.extension("Sound").unwrap(), ["meow", "bark"]);
        assert!(t.vocabulary.conforms("Kind", CONCEPT));
        assert_eq!(t.concept_facts.len(), 2);
        assert_eq!(t.concept_facts[1].args, ["Dog"]);
        assert_eq!(t.concept_facts[1].value, "bark");

        let bad = format!("{DECLS}\ndefine age(`tom) = `meow");
        assert_eq!(parse_theory(&bad).unwrap_err().kind, ParseErrorKind::InvalidDefine);
    }

    #[test]
    fn vocabulary_errors_are_positioned() {
        let err = parse_theory("type A\ntype A").unwrap_err();
        assert_eq!(err.kind.name(), "DuplicateType");
        assert_eq!(err.span, Span::new(2, 1));
        let err = parse_theory("type Noise := {`Noise}").unwrap_err();
        assert_eq!(err.kind.name(), "ExtensionOnNonConceptType");
    }
}

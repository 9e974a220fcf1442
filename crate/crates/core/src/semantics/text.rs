//! The `.str` structure format:
//!
//! ```text
//! type Animal = { t, d }
//! interp tom = t
//! interp age = { t -> 3, d -> 5 }
//! interp meow = { t }
//! nat_bound = 5
//! ```
//!
//! Predicate entries without `->` list the tuples that hold. Elements are
//! identifiers, numbers, `true`/`false` and concepts `@s`.

use std::fmt::Write;

use thiserror::Error;

use crate::span::Span;
use crate::syntax::{tokenize, Token, TokenKind};

use super::{DomainElement, FunctionGraph, Structure};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{span}: {message}")]
pub struct StructureParseError {
    pub span: Span,
    pub message: String,
}

type SResult<T> = Result<T, StructureParseError>;

struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn advance(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
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

    fn fail<T>(&self, wanted: &str) -> SResult<T> {
        let t = self.peek();
        Err(StructureParseError { span: t.span, message: format!("expected {wanted}, found {}", t.kind.describe()) })
    }

    fn expect(&mut self, kind: TokenKind, wanted: &str) -> SResult<()> {
        if self.eat(&kind) {
            Ok(())
        } else {
            self.fail(wanted)
        }
    }

    fn name(&mut self) -> SResult<String> {
        match self.peek().kind.clone() {
            TokenKind::Ident(s) => {
                self.advance();
                Ok(s)
            }
            _ => self.fail("a name"),
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek().kind, TokenKind::Newline | TokenKind::Semi) {
            self.advance();
        }
    }
}

pub fn parse_structure(text: &str) -> SResult<Structure> {
    let tokens = tokenize(text).map_err(|e| StructureParseError { span: e.span, message: e.message })?;
    let mut c = Cursor { tokens, pos: 0 };
    let mut s = Structure::new();
    loop {
        c.skip_separators();
        let start = c.peek().span;
        let keyword = match c.peek().kind.clone() {
            TokenKind::Eof => break,
            TokenKind::Ident(k) => k,
            _ => return c.fail("`type`, `interp` or `nat_bound`"),
        };
        c.advance();
        let duplicate = |what: &str, name: &str| StructureParseError {
            span: start,
            message: format!("{what} {name} is given twice"),
        };
        match keyword.as_str() {
            "type" => {
                let name = c.name()?;
                c.expect(TokenKind::Eq, "`=`")?;
                let elements = braced(&mut c, element)?;
                if s.types.insert(name.clone(), elements.into_iter().collect()).is_some() {
                    return Err(duplicate("type", &name));
                }
            }
            "interp" => {
                let name = c.name()?;
                c.expect(TokenKind::Eq, "`=`")?;
                let mut graph = FunctionGraph::new();
                if c.peek().kind == TokenKind::LBrace {
                    for (args, value) in braced(&mut c, row)? {
                        graph.insert(args, value);
                    }
                } else {
                    graph.insert(Vec::new(), element(&mut c)?);
                }
                if s.interps.insert(name.clone(), graph).is_some() {
                    return Err(duplicate("interpretation of", &name));
                }
            }
            "nat_bound" => {
                c.expect(TokenKind::Eq, "`=`")?;
                let TokenKind::Num(n) = c.peek().kind else { return c.fail("a number") };
                c.advance();
                if s.nat_bound.replace(n).is_some() {
                    return Err(duplicate("setting", "nat_bound"));
                }
            }
            _ => {
                return Err(StructureParseError {
                    span: start,
                    message: format!("expected `type`, `interp` or `nat_bound`, found `{keyword}`"),
                })
            }
        }
        if !matches!(c.peek().kind, TokenKind::Newline | TokenKind::Semi | TokenKind::Eof) {
            return c.fail("end of line");
        }
    }
    Ok(s)
}

fn braced<T>(c: &mut Cursor, item: fn(&mut Cursor) -> SResult<T>) -> SResult<Vec<T>> {
    c.expect(TokenKind::LBrace, "`{`")?;
    let mut out = Vec::new();
    if c.eat(&TokenKind::RBrace) {
        return Ok(out);
    }
    loop {
        out.push(item(c)?);
        if c.eat(&TokenKind::RBrace) {
            return Ok(out);
        }
        c.expect(TokenKind::Comma, "`,` or `}`")?;
    }
}

fn element(c: &mut Cursor) -> SResult<DomainElement> {
    match c.peek().kind.clone() {
        TokenKind::Ident(s) => {
            c.advance();
            Ok(match s.as_str() {
                "true" => DomainElement::Bool(true),
                "false" => DomainElement::Bool(false),
                _ => DomainElement::Plain(s),
            })
        }
        TokenKind::Num(n) => {
            c.advance();
            Ok(DomainElement::Nat(n))
        }
        TokenKind::At | TokenKind::Backtick => {
            c.advance();
            Ok(DomainElement::Concept(c.name()?))
        }
        _ => c.fail("an element"),
    }
}

/// `(a, b) -> r`, `a -> r`, or a tuple that holds.
fn row(c: &mut Cursor) -> SResult<(Vec<DomainElement>, DomainElement)> {
    let args = if c.eat(&TokenKind::LParen) {
        let mut args = Vec::new();
        if !c.eat(&TokenKind::RParen) {
            loop {
                args.push(element(c)?);
                if c.eat(&TokenKind::RParen) {
                    break;
                }
                c.expect(TokenKind::Comma, "`,` or `)`")?;
            }
        }
        args
    } else {
        vec![element(c)?]
    };
    let value = if c.eat(&TokenKind::Arrow) { element(c)? } else { DomainElement::Bool(true) };
    Ok((args, value))
}

fn tuple(args: &[DomainElement]) -> String {
    match args {
        [one] => one.to_string(),
        _ => format!("({})", super::join_elements(args)),
    }
}

/// Canonical text: types, then interpretations, each sorted by name, with
/// elements and rows in canonical element order. Predicates list only the
/// tuples that hold.
pub fn print_structure(s: &Structure) -> String {
    let mut out = String::new();
    for (name, set) in &s.types {
        let items: Vec<String> = set.iter().map(ToString::to_string).collect();
        writeln!(out, "type {name} = {{ {} }}", items.join(", ")).unwrap();
    }
    for (name, graph) in &s.interps {
        let rows: Vec<&(Vec<DomainElement>, DomainElement)> = graph.rows.iter().collect();
        let predicate = rows.iter().all(|(_, v)| v.as_bool().is_some());
        if let [(args, value)] = rows.as_slice() {
            if args.is_empty() && !predicate {
                writeln!(out, "interp {name} = {value}").unwrap();
                continue;
            }
        }
        let items: Vec<String> = if predicate && rows.iter().any(|(a, _)| !a.is_empty()) {
            rows.iter().filter(|(_, v)| *v == DomainElement::Bool(true)).map(|(a, _)| tuple(a)).collect()
        } else {
            rows.iter().map(|(a, v)| format!("{} -> {v}", tuple(a))).collect()
        };
        if items.is_empty() {
            writeln!(out, "interp {name} = {{}}").unwrap();
        } else {
            writeln!(out, "interp {name} = {{ {} }}", items.join(", ")).unwrap();
        }
    }
    if let Some(n) = s.nat_bound {
        writeln!(out, "nat_bound = {n}").unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const S0: &str = "
// the structure used throughout the examples
type Animal = { t, d }
type Cat = { t }
type Dog = { d }
interp tom = t
interp meow = { t }
interp bark = { (d) }
interp age = { t -> 3, (d) -> 5 }
";

    #[test]
    fn parse_and_print() {
        let s = parse_structure(S0).unwrap();
        assert_eq!(s.types["Animal"].len(), 2);
        assert_eq!(s.interps["age"].get(&[DomainElement::plain("d")]), Some(&DomainElement::Nat(5)));
        assert_eq!(
            print_structure(&s),
            "type Animal = { d, t }\ntype Cat = { t }\ntype Dog = { d }\n\
             interp age = { d -> 5, t -> 3 }\ninterp bark = { d }\ninterp meow = { t }\ninterp tom = t\n"
        );
        assert_eq!(parse_structure(&print_structure(&s)).unwrap(), s);
    }

    #[test]
    fn elements_of_every_kind() {
        let s = parse_structure("interp f = { (@meow, 2) -> true, () -> x }\ninterp p = {}\nnat_bound = 4").unwrap();
        assert_eq!(s.nat_bound, Some(4));
        assert!(s.interps["p"].is_empty());
        let text = print_structure(&s);
        assert_eq!(text, "interp f = { () -> x, (@meow, 2) -> true }\ninterp p = {}\nnat_bound = 4\n");
        assert_eq!(parse_structure(&text).unwrap(), s);
        let q = parse_structure("interp q = { () }").unwrap();
        assert_eq!(print_structure(&q), "interp q = { () -> true }\n");
        assert_eq!(parse_structure(&print_structure(&q)).unwrap(), q);
    }

    #[test]
    fn errors_carry_positions() {
        let e = parse_structure("type A = { a,, b }").unwrap_err();
        assert_eq!(e.span, Span::new(1, 14));
        let e = parse_structure("type A = { a }\ntype A = { b }").unwrap_err();
        assert_eq!(e.span, Span::new(2, 1));
        assert!(parse_structure("model A").is_err());
        assert!(parse_structure("interp f = { a -> }").is_err());
    }
}

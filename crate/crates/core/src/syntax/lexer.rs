use crate::span::Span;

use super::parser::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Colon,
    Semi,
    Subtype,
    Assign,
    Arrow,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
    Eq,
    Plus,
    Minus,
    Star,
    Bang,
    Question,
    Backtick,
    Dollar,
    At,
    GuardOpen,
    GuardClose,
    /// Statement terminator. Only emitted where a statement may end.
    Newline,
    Eof,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            TokenKind::Ident(s) => format!("identifier `{s}`"),
            TokenKind::Num(n) => format!("number `{n}`"),
            TokenKind::Newline => "end of line".into(),
            TokenKind::Eof => "end of input".into(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            TokenKind::LParen => "(",
            TokenKind::RParen => ")",
            TokenKind::LBracket => "[",
            TokenKind::RBracket => "]",
            TokenKind::LBrace => "{",
            TokenKind::RBrace => "}",
            TokenKind::Comma => ",",
            TokenKind::Colon => ":",
            TokenKind::Semi => ";",
            TokenKind::Subtype => "<:",
            TokenKind::Assign => ":=",
            TokenKind::Arrow => "->",
            TokenKind::Tilde => "~",
            TokenKind::Amp => "&",
            TokenKind::Pipe => "|",
            TokenKind::Implies => "=>",
            TokenKind::Iff => "<=>",
            TokenKind::Eq => "=",
            TokenKind::Plus => "+",
            TokenKind::Minus => "-",
            TokenKind::Star => "*",
            TokenKind::Bang => "!",
            TokenKind::Question => "?",
            TokenKind::Backtick => "`",
            TokenKind::Dollar => "$",
            TokenKind::At => "@",
            TokenKind::GuardOpen => "<<",
            TokenKind::GuardClose => ">>",
            _ => "",
        }
    }

    /// Tokens after which a line break does not produce a `Newline`.
    fn continues(&self) -> bool {
        !matches!(
            self,
            TokenKind::Ident(_)
                | TokenKind::Num(_)
                | TokenKind::RParen
                | TokenKind::RBracket
                | TokenKind::RBrace
                | TokenKind::GuardClose
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

const SYMBOLS: [(&str, TokenKind); 28] = [
    ("<=>", TokenKind::Iff),
    ("<<", TokenKind::GuardOpen),
    (">>", TokenKind::GuardClose),
    ("<:", TokenKind::Subtype),
    (":=", TokenKind::Assign),
    ("->", TokenKind::Arrow),
    ("=>", TokenKind::Implies),
    ("(", TokenKind::LParen),
    (")", TokenKind::RParen),
    ("[", TokenKind::LBracket),
    ("]", TokenKind::RBracket),
    ("{", TokenKind::LBrace),
    ("}", TokenKind::RBrace),
    (",", TokenKind::Comma),
    (":", TokenKind::Colon),
    (";", TokenKind::Semi),
    ("~", TokenKind::Tilde),
    ("&", TokenKind::Amp),
    ("|", TokenKind::Pipe),
    ("=", TokenKind::Eq),
    ("+", TokenKind::Plus),
    ("-", TokenKind::Minus),
    ("*", TokenKind::Star),
    ("!", TokenKind::Bang),
    ("?", TokenKind::Question),
    ("`", TokenKind::Backtick),
    ("$", TokenKind::Dollar),
    ("@", TokenKind::At),
];

pub fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut tokens: Vec<Token> = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut depth: usize = 0;

    let push = |tokens: &mut Vec<Token>, kind: TokenKind, span: Span| tokens.push(Token { kind, span });

    while i < chars.len() {
        let c = chars[i];
        let span = Span::new(line, col);
        if c == '\n' {
            let last_continues = tokens.last().map_or(true, |t| t.kind.continues());
            if depth == 0 && !last_continues {
                push(&mut tokens, TokenKind::Newline, span);
            }
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            i += 1;
            col += 1;
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            let word: String = chars[start..i].iter().collect();
            col += i - start;
            push(&mut tokens, TokenKind::Ident(word), span);
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            col += i - start;
            let value = digits.parse::<u64>().map_err(|_| {
                ParseError::new(ParseErrorKind::Syntax, span, format!("number {digits} is too large"))
            })?;
            push(&mut tokens, TokenKind::Num(value), span);
            continue;
        }
        let rest = &chars[i..];
        let matched = SYMBOLS.iter().find(|(text, _)| {
            let t: Vec<char> = text.chars().collect();
            rest.len() >= t.len() && rest[..t.len()] == t[..]
        });
        let Some((text, kind)) = matched else {
            return Err(ParseError::new(ParseErrorKind::Syntax, span, format!("unexpected character `{c}`")));
        };
        match kind {
            TokenKind::LParen | TokenKind::LBracket | TokenKind::LBrace | TokenKind::GuardOpen => depth += 1,
            TokenKind::RParen | TokenKind::RBracket | TokenKind::RBrace | TokenKind::GuardClose => {
                depth = depth.saturating_sub(1)
            }
            _ => {}
        }
        let n = text.chars().count();
        i += n;
        col += n;
        push(&mut tokens, kind.clone(), span);
    }
    tokens.push(Token { kind: TokenKind::Eof, span: Span::new(line, col) });
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        tokenize(src).unwrap().into_iter().map(|t| t.kind).collect()
    }

    #[test]
    fn longest_match_operators() {
        assert_eq!(
            kinds("<=> <: << >> => = :="),
            vec![
                TokenKind::Iff,
                TokenKind::Subtype,
                TokenKind::GuardOpen,
                TokenKind::GuardClose,
                TokenKind::Implies,
                TokenKind::Eq,
                TokenKind::Assign,
                TokenKind::Eof
            ]
        );
    }

    #[test]
    fn newlines_only_where_statements_end() {
        let ks = kinds("axiom a: p &\n q\naxiom b: (p\n| q)\n\n");
        let newlines = ks.iter().filter(|k| **k == TokenKind::Newline).count();
        assert_eq!(newlines, 2);
    }

    #[test]
    fn comments_and_positions() {
        let toks = tokenize("// header\n  meow(tom)").unwrap();
        assert_eq!(toks[0].kind, TokenKind::Ident("meow".into()));
        assert_eq!(toks[0].span, Span::new(2, 3));
    }

    #[test]
    fn bad_character() {
        let err = tokenize("p # q").unwrap_err();
        assert_eq!(err.span, Span::new(1, 3));
    }
}

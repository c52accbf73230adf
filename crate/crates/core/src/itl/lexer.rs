use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::parser::{Expected, Found, ParseError};
use super::{is_reserved_word, Keyword};
use crate::ltl::AtomName;

/// Byte range `[start, end)` into the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum TokenKind {
    Keyword(Keyword),
    Ident(AtomName),
    LParen,
    RParen,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
}

struct Scanner<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn skip_ws(&mut self) {
        let rest = &self.src[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Word of `[A-Za-z0-9_]` starting at `at`, if any.
    fn word_at(&self, at: usize) -> Option<(usize, usize)> {
        let bytes = self.src.as_bytes();
        let mut end = at;
        while end < bytes.len() && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_') {
            end += 1;
        }
        (end > at).then_some((at, end))
    }

    fn next_non_ws(&self, from: usize) -> usize {
        let rest = &self.src[from..];
        from + (rest.len() - rest.trim_start().len())
    }

    /// Matches the lowercase words `seq` after `from`, separated by whitespace.
    /// Returns the end offset of the last word.
    fn follows(&self, from: usize, seq: &[&str]) -> Option<usize> {
        let mut at = from;
        for w in seq {
            let start = self.next_non_ws(at);
            let (s, e) = self.word_at(start)?;
            if !self.src[s..e].eq_ignore_ascii_case(w) {
                return None;
            }
            at = e;
        }
        Some(at)
    }

    /// Offset just past a comma following `from` (whitespace allowed before it).
    fn comma_after(&self, from: usize) -> Option<usize> {
        let at = self.next_non_ws(from);
        (self.src.as_bytes().get(at) == Some(&b',')).then_some(at + 1)
    }
}

fn lex_error(position: usize, found: Found, expected: impl IntoIterator<Item = Expected>, message: &str) -> ParseError {
    ParseError {
        position,
        found,
        expected: expected.into_iter().collect::<BTreeSet<_>>(),
        message: message.to_string(),
        partial_ast: None,
    }
}

/// Splits `source` into keyword, identifier, and parenthesis tokens.
///
/// Multiword keywords are matched greedily, keywords are case-insensitive,
/// and the commas of `always,`, `eventually,`, `in the next state,` and
/// `, then` belong to their keyword's span.
pub fn lex(source: &str) -> Result<Vec<Token>, ParseError> {
    let mut sc = Scanner { src: source, pos: 0 };
    let mut out = Vec::new();
    loop {
        sc.skip_ws();
        let start = sc.pos;
        let Some(c) = source[start..].chars().next() else { break };
        let (kind, end) = match c {
            '(' => (TokenKind::LParen, start + 1),
            ')' => (TokenKind::RParen, start + 1),
            ',' => match sc.follows(start + 1, &["then"]) {
                Some(end) => (TokenKind::Keyword(Keyword::Then), end),
                None => {
                    return Err(lex_error(
                        start,
                        Found::Text(",".into()),
                        [Expected::Keyword(Keyword::Then)],
                        "a bare comma must introduce `then`",
                    ))
                }
            },
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let (ws, we) = sc.word_at(start).expect("word start");
                lex_word(&sc, ws, we)?
            }
            other => {
                return Err(lex_error(
                    start,
                    Found::Text(other.to_string()),
                    [Expected::AnyKeyword, Expected::Identifier],
                    "illegal character",
                ))
            }
        };
        out.push(Token { kind, span: Span { start, end } });
        sc.pos = end;
    }
    Ok(out)
}

fn lex_word(sc: &Scanner<'_>, ws: usize, we: usize) -> Result<(TokenKind, usize), ParseError> {
    let raw = &sc.src[ws..we];
    let lower = raw.to_ascii_lowercase();
    let kw = |k: Keyword, end: usize| Ok((TokenKind::Keyword(k), end));
    let needs = |k: Keyword, msg: &str| {
        Err(lex_error(ws, Found::Text(raw.to_string()), [Expected::Keyword(k)], msg))
    };
    match lower.as_str() {
        "true" => kw(Keyword::True, we),
        "false" => kw(Keyword::False, we),
        "not" => kw(Keyword::Not, we),
        "and" => kw(Keyword::And, we),
        "or" => kw(Keyword::Or, we),
        "until" => kw(Keyword::Until, we),
        "releases" => kw(Keyword::Releases, we),
        "if" => match sc.follows(we, &["and", "only", "if"]) {
            Some(end) => kw(Keyword::Iff, end),
            None => kw(Keyword::If, we),
        },
        "weakly" => match sc.follows(we, &["until"]) {
            Some(end) => kw(Keyword::WeaklyUntil, end),
            None => needs(Keyword::WeaklyUntil, "`weakly` must be followed by `until`"),
        },
        "in" => match sc.follows(we, &["the", "next", "state"]).and_then(|e| sc.comma_after(e)) {
            Some(end) => kw(Keyword::Next, end),
            None => needs(Keyword::Next, "expected `in the next state,`"),
        },
        "always" => match sc.comma_after(we) {
            Some(end) => kw(Keyword::Always, end),
            None => needs(Keyword::Always, "expected `always,`"),
        },
        "eventually" => match sc.comma_after(we) {
            Some(end) => kw(Keyword::Eventually, end),
            None => needs(Keyword::Eventually, "expected `eventually,`"),
        },
        w if is_reserved_word(w) => Err(lex_error(
            ws,
            Found::Text(raw.to_string()),
            [Expected::AnyKeyword, Expected::Identifier],
            "reserved word used as identifier",
        )),
        _ => {
            let atom = AtomName::new(raw).map_err(|e| {
                lex_error(
                    ws,
                    Found::Text(raw.to_string()),
                    [Expected::AnyKeyword, Expected::Identifier],
                    &e.to_string(),
                )
            })?;
            // An identifier glued to a comma that does not open `, then` is a
            // malformed comma keyword such as `eventual,`.
            if let Some(after) = sc.comma_after(we) {
                if sc.follows(after, &["then"]).is_none() {
                    return Err(lex_error(
                        ws,
                        Found::Text(raw.to_string()),
                        [Expected::AnyKeyword, Expected::Identifier],
                        "unknown keyword",
                    ));
                }
            }
            Ok((TokenKind::Ident(atom), we))
        }
    }
}

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::lexer::{lex, Token, TokenKind};
use super::{Keyword, PartialFormula};
use crate::ltl::{Formula, Kind};

/// Nesting limit; deeper input is rejected instead of exhausting the stack.
const MAX_NESTING: usize = 256;

/// A token class the parser would have accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "keyword")]
pub enum Expected {
    Keyword(Keyword),
    AnyKeyword,
    Identifier,
    LParen,
    RParen,
    EndOfInput,
}

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expected::Keyword(k) => write!(f, "`{}`", k.text()),
            Expected::AnyKeyword => f.write_str("keyword"),
            Expected::Identifier => f.write_str("identifier"),
            Expected::LParen => f.write_str("`(`"),
            Expected::RParen => f.write_str("`)`"),
            Expected::EndOfInput => f.write_str("end of input"),
        }
    }
}

/// What was found at an error position.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "value")]
pub enum Found {
    Token(TokenKind),
    /// Text that could not be lexed.
    Text(String),
    EndOfInput,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseError {
    /// Byte offset into the source, within `[0, len]`.
    pub position: usize,
    pub found: Found,
    /// Never empty.
    pub expected: BTreeSet<Expected>,
    pub message: String,
    /// Tree built before the failure, present when some prefix parsed.
    pub partial_ast: Option<PartialFormula>,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at byte {}; expected ", self.message, self.position)?;
        for (i, e) in self.expected.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ParseError {}

struct Failure {
    error: ParseError,
    partial: PartialFormula,
}

type PResult = Result<Formula, Box<Failure>>;

fn operand_starts() -> BTreeSet<Expected> {
    [
        Expected::Identifier,
        Expected::LParen,
        Expected::Keyword(Keyword::True),
        Expected::Keyword(Keyword::False),
        Expected::Keyword(Keyword::Not),
        Expected::Keyword(Keyword::If),
        Expected::Keyword(Keyword::Next),
        Expected::Keyword(Keyword::Always),
        Expected::Keyword(Keyword::Eventually),
    ]
    .into_iter()
    .collect()
}

fn infix_keywords() -> impl Iterator<Item = Expected> {
    Keyword::ALL.into_iter().filter(|k| k.is_infix()).map(Expected::Keyword)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
    nesting: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek_keyword(&self) -> Option<Keyword> {
        match self.peek() {
            Some(TokenKind::Keyword(k)) => Some(*k),
            _ => None,
        }
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.span.start).unwrap_or(self.len)
    }

    fn found(&self) -> Found {
        match self.peek() {
            Some(k) => Found::Token(k.clone()),
            None => Found::EndOfInput,
        }
    }

    fn fail(&self, expected: BTreeSet<Expected>, message: &str, partial: PartialFormula) -> Box<Failure> {
        Box::new(Failure {
            error: ParseError {
                position: self.offset(),
                found: self.found(),
                expected,
                message: message.to_string(),
                partial_ast: None,
            },
            partial,
        })
    }

    fn expr(&mut self) -> PResult {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return Err(self.fail(operand_starts(), "nesting too deep", PartialFormula::Hole));
        }
        let r = self.binary_level(0);
        self.nesting -= 1;
        r
    }

    /// Levels 0..=3: iff, or, and, until/releases/weakly until. All left-associative.
    fn binary_level(&mut self, level: usize) -> PResult {
        if level == 4 {
            return self.unary();
        }
        let mut lhs = self.binary_level(level + 1)?;
        loop {
            let kind = match (level, self.peek_keyword()) {
                (0, Some(Keyword::Iff)) => Kind::Iff,
                (1, Some(Keyword::Or)) => Kind::Or,
                (2, Some(Keyword::And)) => Kind::And,
                (3, Some(Keyword::Until)) => Kind::Until,
                (3, Some(Keyword::Releases)) => Kind::Release,
                (3, Some(Keyword::WeaklyUntil)) => Kind::WeakUntil,
                _ => return Ok(lhs),
            };
            self.pos += 1;
            match self.binary_level(level + 1) {
                Ok(rhs) => lhs = Formula::from_kind(kind, None, vec![lhs, rhs]).expect("binary"),
                Err(mut f) => {
                    let inner = std::mem::replace(&mut f.partial, PartialFormula::Hole);
                    f.partial = PartialFormula::node(kind, vec![PartialFormula::Complete(lhs), inner]);
                    return Err(f);
                }
            }
        }
    }

    fn unary(&mut self) -> PResult {
        if self.peek_keyword() == Some(Keyword::Not) {
            self.pos += 1;
            self.nesting += 1;
            if self.nesting > MAX_NESTING {
                return Err(self.fail(operand_starts(), "nesting too deep", PartialFormula::Hole));
            }
            let r = self.unary();
            self.nesting -= 1;
            return wrap_unary(Kind::Not, r);
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.fail(operand_starts(), "expected an operand, found end of input", PartialFormula::Hole));
        };
        match tok {
            TokenKind::Ident(a) => {
                self.pos += 1;
                Ok(Formula::Atom(a))
            }
            TokenKind::Keyword(Keyword::True) => {
                self.pos += 1;
                Ok(Formula::True)
            }
            TokenKind::Keyword(Keyword::False) => {
                self.pos += 1;
                Ok(Formula::False)
            }
            TokenKind::Keyword(k @ (Keyword::Always | Keyword::Eventually | Keyword::Next)) => {
                self.pos += 1;
                let kind = match k {
                    Keyword::Always => Kind::Globally,
                    Keyword::Eventually => Kind::Eventually,
                    _ => Kind::Next,
                };
                let r = self.expr();
                wrap_unary(kind, r)
            }
            TokenKind::Keyword(Keyword::If) => {
                self.pos += 1;
                let ante = match self.expr() {
                    Ok(a) => a,
                    Err(mut f) => {
                        let inner = std::mem::replace(&mut f.partial, PartialFormula::Hole);
                        f.partial = PartialFormula::node(Kind::Implies, vec![inner, PartialFormula::Hole]);
                        return Err(f);
                    }
                };
                if self.peek_keyword() != Some(Keyword::Then) {
                    let mut expected: BTreeSet<Expected> = infix_keywords().collect();
                    expected.insert(Expected::Keyword(Keyword::Then));
                    return Err(self.fail(
                        expected,
                        "expected `, then`",
                        PartialFormula::node(Kind::Implies, vec![PartialFormula::Complete(ante), PartialFormula::Hole]),
                    ));
                }
                self.pos += 1;
                match self.expr() {
                    Ok(cons) => Ok(Formula::implies(ante, cons)),
                    Err(mut f) => {
                        let inner = std::mem::replace(&mut f.partial, PartialFormula::Hole);
                        f.partial = PartialFormula::node(Kind::Implies, vec![PartialFormula::Complete(ante), inner]);
                        Err(f)
                    }
                }
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(&TokenKind::RParen) {
                    let mut expected: BTreeSet<Expected> = infix_keywords().collect();
                    expected.insert(Expected::RParen);
                    return Err(self.fail(expected, "expected `)`", PartialFormula::Complete(inner)));
                }
                self.pos += 1;
                Ok(inner)
            }
            _ => Err(self.fail(operand_starts(), "expected an operand", PartialFormula::Hole)),
        }
    }
}

fn wrap_unary(kind: Kind, r: PResult) -> PResult {
    match r {
        Ok(f) => Ok(Formula::from_kind(kind, None, vec![f]).expect("unary")),
        Err(mut f) => {
            let inner = std::mem::replace(&mut f.partial, PartialFormula::Hole);
            f.partial = PartialFormula::node(kind, vec![inner]);
            Err(f)
        }
    }
}

/// Parses a keyword-language string.
///
/// Unparenthesized input follows this precedence, tightest first: `not`;
/// `until` / `releases` / `weakly until`; `and`; `or`; `if and only if`.
/// Binary operators associate to the left. `always,`, `eventually,`,
/// `in the next state,` and `if …, then …` take the longest expression to
/// their right.
///
/// ```
/// use ltlbridge::itl::parse;
/// use ltlbridge::ltl::parse_infix;
///
/// assert_eq!(parse("p and q or r").unwrap(), parse_infix("(p & q) | r").unwrap());
/// assert_eq!(parse("always, p and q").unwrap(), parse_infix("G (p & q)").unwrap());
/// ```
pub fn parse(source: &str) -> Result<Formula, ParseError> {
    let tokens = lex(source)?;
    let mut p = Parser { tokens: &tokens, pos: 0, len: source.len(), nesting: 0 };
    let outcome = p.expr().and_then(|f| {
        if p.pos < tokens.len() {
            let mut expected: BTreeSet<Expected> = infix_keywords().collect();
            expected.insert(Expected::EndOfInput);
            Err(p.fail(expected, "unexpected trailing input", PartialFormula::Complete(f)))
        } else {
            Ok(f)
        }
    });
    outcome.map_err(|f| {
        let Failure { mut error, partial } = *f;
        if !partial.is_hole() {
            error.partial_ast = Some(partial);
        }
        error
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_infix;

    fn ok(src: &str) -> Formula {
        parse(src).unwrap_or_else(|e| panic!("{src}: {e}"))
    }

    fn infix(src: &str) -> Formula {
        parse_infix(src).unwrap()
    }

    #[test]
    fn inverts_serializer_examples() {
        assert_eq!(ok("always, (if p, then eventually, q)"), infix("G (p -> F q)"));
        assert_eq!(ok("not p"), infix("!p"));
        assert_eq!(ok("(p until q)"), infix("p U q"));
        assert_eq!(ok("true"), Formula::True);
    }

    #[test]
    fn precedence_table() {
        assert_eq!(ok("p and q or r"), infix("(p & q) | r"));
        assert_eq!(ok("p or q and r"), infix("p | (q & r)"));
        assert_eq!(ok("not p until q"), infix("(!p) U q"));
        assert_eq!(ok("p until q and r"), infix("(p U q) & r"));
        assert_eq!(ok("p until q until r"), infix("(p U q) U r"));
        assert_eq!(ok("p or q if and only if r"), infix("(p | q) <-> r"));
        assert_eq!(ok("if p, then q and r"), infix("p -> (q & r)"));
        assert_eq!(ok("if always, p, then q"), infix("G p -> q"));
        assert_eq!(ok("p and always, q or r"), infix("p & G (q | r)"));
    }

    #[test]
    fn missing_operand_yields_partial_tree() {
        let e = parse("always, (p until").unwrap_err();
        assert_eq!(e.position, 16);
        assert_eq!(e.found, Found::EndOfInput);
        assert!(e.expected.contains(&Expected::Identifier));
        let partial = e.partial_ast.unwrap();
        assert_eq!(partial.to_string(), "always, (p until □)");
        assert_eq!(partial.holes(), vec![vec![0, 1]]);
    }

    #[test]
    fn missing_close_paren() {
        let e = parse("always, (p and q").unwrap_err();
        assert_eq!(e.position, 16);
        assert!(e.expected.contains(&Expected::RParen));
        assert_eq!(e.partial_ast.unwrap().to_string(), "always, (p and q)");
    }

    #[test]
    fn adjacent_identifiers() {
        let e = parse("(p q)").unwrap_err();
        assert_eq!(e.position, 3);
        assert!(e.expected.contains(&Expected::Keyword(Keyword::And)));
    }

    #[test]
    fn nothing_parsed_means_no_partial() {
        let e = parse(") p").unwrap_err();
        assert_eq!(e.position, 0);
        assert!(e.partial_ast.is_none());
        let e = parse("").unwrap_err();
        assert_eq!(e.position, 0);
        assert_eq!(e.found, Found::EndOfInput);
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let src = "(".repeat(100_000) + "p" + &")".repeat(100_000);
        assert!(parse(&src).is_err());
        let src = "not ".repeat(100_000) + "p";
        assert!(parse(&src).is_err());
        let src = "always, ".repeat(100_000) + "p";
        assert!(parse(&src).is_err());
    }
}

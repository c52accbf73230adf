//! Parser for the infix model-checker dialect produced by `Formula`'s
//! `Display` impl.
//!
//! Precedence, loosest first: `<->` (left), `->` (right), `|`, `&`,
//! `U`/`R`/`W` (right), then the prefix operators `!`, `G`, `F`, `X`.

use super::{AtomName, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("infix LTL syntax error at byte {position}: {message}")]
pub struct InfixError {
    pub position: usize,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    True,
    False,
    Ident(AtomName),
    Not,
    And,
    Or,
    Implies,
    Iff,
    Next,
    Globally,
    Eventually,
    Until,
    Release,
    WeakUntil,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, InfixError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |position: usize, message: String| InfixError { position, message };
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'!' | b'~' => Tok::Not,
            b'&' => {
                if bytes.get(i + 1) == Some(&b'&') {
                    i += 1;
                }
                Tok::And
            }
            b'|' => {
                if bytes.get(i + 1) == Some(&b'|') {
                    i += 1;
                }
                Tok::Or
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                i += 1;
                Tok::Implies
            }
            b'<' if src[i..].starts_with("<->") => {
                i += 2;
                Tok::Iff
            }
            b'1' => Tok::True,
            b'0' => Tok::False,
            b'G' => Tok::Globally,
            b'F' => Tok::Eventually,
            b'X' => Tok::Next,
            b'U' => Tok::Until,
            b'R' => Tok::Release,
            b'W' => Tok::WeakUntil,
            b'a'..=b'z' | b'_' => {
                let mut j = i;
                while j < bytes.len() && matches!(bytes[j], b'a'..=b'z' | b'0'..=b'9' | b'_') {
                    j += 1;
                }
                let word = &src[i..j];
                i = j;
                let tok = match word {
                    "true" => Tok::True,
                    "false" => Tok::False,
                    _ => Tok::Ident(AtomName::new(word).map_err(|e| err(start, e.to_string()))?),
                };
                out.push((start, tok));
                continue;
            }
            _ => {
                let ch = src[i..].chars().next().unwrap_or('?');
                return Err(err(i, format!("unexpected character `{ch}`")));
            }
        };
        i += 1;
        out.push((start, tok));
    }
    Ok(out)
}

const MAX_NESTING: usize = 256;

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
    nesting: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(o, _)| *o).unwrap_or(self.end)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error<T>(&self, message: &str) -> Result<T, InfixError> {
        Err(InfixError { position: self.offset(), message: message.to_string() })
    }

    fn enter(&mut self) -> Result<(), InfixError> {
        self.nesting += 1;
        if self.nesting > MAX_NESTING {
            return self.error("nesting too deep");
        }
        Ok(())
    }

    fn iff(&mut self) -> Result<Formula, InfixError> {
        self.enter()?;
        let mut lhs = self.implies()?;
        while self.eat(&Tok::Iff) {
            lhs = Formula::iff(lhs, self.implies()?);
        }
        self.nesting -= 1;
        Ok(lhs)
    }

    fn implies(&mut self) -> Result<Formula, InfixError> {
        let lhs = self.or()?;
        if self.eat(&Tok::Implies) {
            self.enter()?;
            let rhs = self.implies()?;
            self.nesting -= 1;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, InfixError> {
        let mut lhs = self.and()?;
        while self.eat(&Tok::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, InfixError> {
        let mut lhs = self.temporal()?;
        while self.eat(&Tok::And) {
            lhs = Formula::and(lhs, self.temporal()?);
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula, InfixError> {
        let lhs = self.unary()?;
        let ctor: fn(Formula, Formula) -> Formula = match self.peek() {
            Some(Tok::Until) => Formula::until,
            Some(Tok::Release) => Formula::release,
            Some(Tok::WeakUntil) => Formula::weak_until,
            _ => return Ok(lhs),
        };
        self.pos += 1;
        self.enter()?;
        let rhs = self.temporal()?;
        self.nesting -= 1;
        Ok(ctor(lhs, rhs))
    }

    fn unary(&mut self) -> Result<Formula, InfixError> {
        let ctor: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Not) => Formula::not,
            Some(Tok::Globally) => Formula::globally,
            Some(Tok::Eventually) => Formula::eventually,
            Some(Tok::Next) => Formula::next,
            _ => return self.primary(),
        };
        self.pos += 1;
        self.enter()?;
        let inner = self.unary()?;
        self.nesting -= 1;
        Ok(ctor(inner))
    }

    fn primary(&mut self) -> Result<Formula, InfixError> {
        let tok = match self.peek() {
            Some(t) => t.clone(),
            None => return self.error("expected an operand, found end of input"),
        };
        self.pos += 1;
        match tok {
            Tok::True => Ok(Formula::True),
            Tok::False => Ok(Formula::False),
            Tok::Ident(a) => Ok(Formula::Atom(a)),
            Tok::LParen => {
                let inner = self.iff()?;
                if !self.eat(&Tok::RParen) {
                    return self.error("expected `)`");
                }
                Ok(inner)
            }
            _ => {
                self.pos -= 1;
                self.error("expected an operand")
            }
        }
    }
}

/// Parses infix LTL such as `G (p -> F q)`.
pub fn parse_infix(src: &str) -> Result<Formula, InfixError> {
    let toks = lex(src)?;
    let mut p = Parser { toks, pos: 0, end: src.len(), nesting: 0 };
    let f = p.iff()?;
    if p.pos != p.toks.len() {
        return p.error("unexpected trailing input");
    }
    Ok(f)
}

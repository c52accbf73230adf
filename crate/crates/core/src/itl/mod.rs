//! The keyword language: a readable surface syntax in one-to-one
//! correspondence with [`Formula`].
//!
//! [`serialize`] renders a formula using the fixed keyword table and
//! parenthesizes every binary operator; [`parse`] inverts it. The parser also
//! accepts unparenthesized input under a fixed precedence (see [`parse`]) and
//! reports structured errors with a partial tree for the repair layer.

mod lexer;
mod parser;
mod partial;
mod serialize;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ltl::Formula;

pub use lexer::{lex, Span, Token, TokenKind};
pub use parser::{parse, Expected, Found, ParseError};
pub use partial::PartialFormula;
pub use serialize::{render_minimal, serialize};
pub(crate) use serialize::render_minimal_with;

/// Words that can never be atom names.
pub const RESERVED_WORDS: [&str; 17] = [
    "true",
    "false",
    "not",
    "and",
    "or",
    "if",
    "then",
    "only",
    "until",
    "releases",
    "weakly",
    "always",
    "eventually",
    "in",
    "the",
    "next",
    "state",
];

pub fn is_reserved_word(word: &str) -> bool {
    RESERVED_WORDS.contains(&word)
}

/// Keywords of the language. The [`Keyword::surface`] strings are emitted
/// verbatim by the serializer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Keyword {
    True,
    False,
    Not,
    And,
    Or,
    If,
    Then,
    Iff,
    Next,
    Always,
    Eventually,
    Until,
    Releases,
    WeaklyUntil,
}

impl Keyword {
    pub const ALL: [Keyword; 14] = [
        Keyword::True,
        Keyword::False,
        Keyword::Not,
        Keyword::And,
        Keyword::Or,
        Keyword::If,
        Keyword::Then,
        Keyword::Iff,
        Keyword::Next,
        Keyword::Always,
        Keyword::Eventually,
        Keyword::Until,
        Keyword::Releases,
        Keyword::WeaklyUntil,
    ];

    /// Exact string the serializer emits, including surrounding spaces and
    /// attached commas.
    pub fn surface(self) -> &'static str {
        match self {
            Keyword::True => "true",
            Keyword::False => "false",
            Keyword::Not => "not ",
            Keyword::And => " and ",
            Keyword::Or => " or ",
            Keyword::If => "if ",
            Keyword::Then => ", then ",
            Keyword::Iff => " if and only if ",
            Keyword::Next => "in the next state, ",
            Keyword::Always => "always, ",
            Keyword::Eventually => "eventually, ",
            Keyword::Until => " until ",
            Keyword::Releases => " releases ",
            Keyword::WeaklyUntil => " weakly until ",
        }
    }

    /// Surface form with surrounding whitespace trimmed.
    pub fn text(self) -> &'static str {
        self.surface().trim()
    }

    /// Binary infix keywords.
    pub fn is_infix(self) -> bool {
        matches!(
            self,
            Keyword::And | Keyword::Or | Keyword::Iff | Keyword::Until | Keyword::Releases | Keyword::WeaklyUntil
        )
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.text())
    }
}

/// A keyword-language string together with its lexing and parsing outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItlDocument {
    pub source: String,
    /// Present iff lexing succeeded.
    pub tokens: Option<Vec<Token>>,
    pub parse: Result<Formula, ParseError>,
}

impl ItlDocument {
    pub fn new(source: impl Into<String>) -> Self {
        let source = source.into();
        let tokens = lex(&source).ok();
        let parse = parse(&source);
        ItlDocument { source, tokens, parse }
    }

    pub fn from_formula(f: &Formula) -> Self {
        ItlDocument::new(serialize(f))
    }

    pub fn formula(&self) -> Option<&Formula> {
        self.parse.as_ref().ok()
    }

    pub fn error(&self) -> Option<&ParseError> {
        self.parse.as_ref().err()
    }
}

/// `parse(serialize(f)) == f`, structurally.
pub fn roundtrip_check(f: &Formula) -> bool {
    parse(&serialize(f)).as_ref() == Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_infix;

    #[test]
    fn grammar_file_lists_reserved_words() {
        let ebnf = include_str!("../../../../book/src/itl.ebnf");
        let reserved = &ebnf[ebnf.find("reserved    =").unwrap()..];
        let reserved = &reserved[..reserved.find(';').unwrap()];
        for w in RESERVED_WORDS {
            assert!(reserved.contains(&format!("\"{w}\"")), "{w}");
        }
        assert_eq!(reserved.matches('"').count(), 2 * RESERVED_WORDS.len());
    }

    #[test]
    fn roundtrip_examples() {
        for src in ["p", "G (p U (q <-> r))", "!(p & X !q) W 0", "(G p & q) -> F !F r"] {
            let f = parse_infix(src).unwrap();
            assert!(roundtrip_check(&f), "{src} -> {}", serialize(&f));
        }
    }

    #[test]
    fn document_records_outcome() {
        let ok = ItlDocument::new("eventually, p");
        assert!(ok.tokens.is_some());
        assert_eq!(ok.formula(), Some(&Formula::eventually(Formula::atom("p"))));
        let bad = ItlDocument::new("eventual, p");
        assert!(bad.tokens.is_none());
        assert_eq!(bad.error().unwrap().position, 0);
    }

    #[test]
    fn surface_strings_are_exact() {
        let joined: Vec<&str> = Keyword::ALL.iter().map(|k| k.surface()).collect();
        assert_eq!(
            joined,
            [
                "true",
                "false",
                "not ",
                " and ",
                " or ",
                "if ",
                ", then ",
                " if and only if ",
                "in the next state, ",
                "always, ",
                "eventually, ",
                " until ",
                " releases ",
                " weakly until "
            ]
        );
    }
}

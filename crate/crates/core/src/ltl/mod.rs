//! Linear temporal logic syntax.
//!
//! [`Formula`] is an immutable tree over named atomic propositions. It carries
//! the full operator set (`¬ ∧ ∨ → ↔ X G F U R W`) so that translation to and
//! from the keyword language is one-to-one; [`expand_derived`] and [`to_nnf`]
//! reduce it to smaller operator cores when a consumer needs one.

mod infix;
mod nnf;
mod random;
mod stats;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use infix::{parse_infix, InfixError};
pub use nnf::{expand_derived, is_nnf, to_nnf};
pub use random::{random_formula, RandomFormulaError};
pub use stats::{stats, FormulaStats, Stratum};

use crate::itl::is_reserved_word;

/// A validated atomic proposition name.
///
/// Names match `[a-z_][a-z0-9_]*` and may not collide with a keyword-language
/// reserved word.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct AtomName(String);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AtomNameError {
    #[error("atom name is empty")]
    Empty,
    #[error("atom name `{0}` must match [a-z_][a-z0-9_]*")]
    InvalidCharacters(String),
    #[error("atom name `{0}` is a reserved word")]
    Reserved(String),
}

impl AtomName {
    pub fn new(text: impl Into<String>) -> Result<Self, AtomNameError> {
        let text = text.into();
        let mut chars = text.chars();
        match chars.next() {
            None => return Err(AtomNameError::Empty),
            Some(c) if c.is_ascii_lowercase() || c == '_' => {}
            Some(_) => return Err(AtomNameError::InvalidCharacters(text)),
        }
        if !chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_') {
            return Err(AtomNameError::InvalidCharacters(text));
        }
        if is_reserved_word(&text) {
            return Err(AtomNameError::Reserved(text));
        }
        Ok(AtomName(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for AtomName {
    type Error = AtomNameError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        AtomName::new(value)
    }
}

impl From<AtomName> for String {
    fn from(value: AtomName) -> Self {
        value.0
    }
}

impl AsRef<str> for AtomName {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AtomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for AtomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// An LTL formula. Structural equality is formula identity.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    True,
    False,
    Atom(AtomName),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Globally(Box<Formula>),
    Eventually(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Release(Box<Formula>, Box<Formula>),
    WeakUntil(Box<Formula>, Box<Formula>),
}

/// Node kind of a [`Formula`], without children.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    True,
    False,
    Atom,
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
}

impl Kind {
    pub const ALL: [Kind; 14] = [
        Kind::True,
        Kind::False,
        Kind::Atom,
        Kind::Not,
        Kind::And,
        Kind::Or,
        Kind::Implies,
        Kind::Iff,
        Kind::Next,
        Kind::Globally,
        Kind::Eventually,
        Kind::Until,
        Kind::Release,
        Kind::WeakUntil,
    ];

    pub fn arity(self) -> usize {
        match self {
            Kind::True | Kind::False | Kind::Atom => 0,
            Kind::Not | Kind::Next | Kind::Globally | Kind::Eventually => 1,
            _ => 2,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl Formula {
    /// Builds an atom, panicking on an invalid name. Intended for literals in
    /// tests and examples; use [`AtomName::new`] for untrusted input.
    pub fn atom(name: &str) -> Formula {
        Formula::Atom(AtomName::new(name).expect("invalid atom name"))
    }

    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::Next(Box::new(f))
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::Globally(Box::new(f))
    }

    pub fn eventually(f: Formula) -> Formula {
        Formula::Eventually(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Formula {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn release(a: Formula, b: Formula) -> Formula {
        Formula::Release(Box::new(a), Box::new(b))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Formula {
        Formula::WeakUntil(Box::new(a), Box::new(b))
    }

    /// Rebuilds a node of `kind` from children. `atom` is consulted only for
    /// [`Kind::Atom`]. Returns `None` when the child count does not match.
    pub fn from_kind(kind: Kind, atom: Option<AtomName>, mut children: Vec<Formula>) -> Option<Formula> {
        if children.len() != kind.arity() {
            return None;
        }
        let mut next = || Box::new(children.remove(0));
        Some(match kind {
            Kind::True => Formula::True,
            Kind::False => Formula::False,
            Kind::Atom => Formula::Atom(atom?),
            Kind::Not => Formula::Not(next()),
            Kind::Next => Formula::Next(next()),
            Kind::Globally => Formula::Globally(next()),
            Kind::Eventually => Formula::Eventually(next()),
            Kind::And => Formula::And(next(), next()),
            Kind::Or => Formula::Or(next(), next()),
            Kind::Implies => Formula::Implies(next(), next()),
            Kind::Iff => Formula::Iff(next(), next()),
            Kind::Until => Formula::Until(next(), next()),
            Kind::Release => Formula::Release(next(), next()),
            Kind::WeakUntil => Formula::WeakUntil(next(), next()),
        })
    }

    pub fn kind(&self) -> Kind {
        match self {
            Formula::True => Kind::True,
            Formula::False => Kind::False,
            Formula::Atom(_) => Kind::Atom,
            Formula::Not(_) => Kind::Not,
            Formula::And(..) => Kind::And,
            Formula::Or(..) => Kind::Or,
            Formula::Implies(..) => Kind::Implies,
            Formula::Iff(..) => Kind::Iff,
            Formula::Next(_) => Kind::Next,
            Formula::Globally(_) => Kind::Globally,
            Formula::Eventually(_) => Kind::Eventually,
            Formula::Until(..) => Kind::Until,
            Formula::Release(..) => Kind::Release,
            Formula::WeakUntil(..) => Kind::WeakUntil,
        }
    }

    pub fn children(&self) -> Vec<&Formula> {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => vec![],
            Formula::Not(a) | Formula::Next(a) | Formula::Globally(a) | Formula::Eventually(a) => vec![a],
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b)
            | Formula::WeakUntil(a, b) => vec![a, b],
        }
    }

    /// Same node with new children, or `None` when the count does not match.
    pub fn with_children(&self, children: Vec<Formula>) -> Option<Formula> {
        let atom = match self {
            Formula::Atom(a) => Some(a.clone()),
            _ => None,
        };
        Formula::from_kind(self.kind(), atom, children)
    }

    pub fn atoms(&self) -> BTreeSet<AtomName> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<AtomName>) {
        if let Formula::Atom(a) = self {
            out.insert(a.clone());
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|c| c.node_count()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Subterm at a child-index path, root at `[]`.
    pub fn subterm(&self, path: &[usize]) -> Option<&Formula> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.subterm(rest)),
        }
    }

    /// Replaces the subterm at `path`, returning `None` if the path does not
    /// address a node.
    pub fn replace_at(&self, path: &[usize], replacement: Formula) -> Option<Formula> {
        match path.split_first() {
            None => Some(replacement),
            Some((&i, rest)) => {
                let mut kids: Vec<Formula> = self.children().into_iter().cloned().collect();
                let child = kids.get(i)?.replace_at(rest, replacement)?;
                kids[i] = child;
                self.with_children(kids)
            }
        }
    }

    /// All node paths in preorder.
    pub fn paths(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut prefix = Vec::new();
        self.collect_paths(&mut prefix, &mut out);
        out
    }

    fn collect_paths(&self, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(prefix.clone());
        for (i, c) in self.children().into_iter().enumerate() {
            prefix.push(i);
            c.collect_paths(prefix, out);
            prefix.pop();
        }
    }

    /// Applies `f` to every node bottom-up.
    pub fn map_bottom_up(&self, f: &mut impl FnMut(Formula) -> Formula) -> Formula {
        let kids: Vec<Formula> = self.children().into_iter().map(|c| c.map_bottom_up(f)).collect();
        let rebuilt = self.with_children(kids).expect("arity preserved");
        f(rebuilt)
    }
}

/// Infix rendering in the model-checker dialect (`G`, `F`, `X`, `U`, `R`,
/// `W`, `!`, `&`, `|`, `->`, `<->`, `1`, `0`). Binary operators are always
/// parenthesized so the output parses back unambiguously.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("1"),
            Formula::False => f.write_str("0"),
            Formula::Atom(a) => f.write_str(a.as_str()),
            Formula::Not(a) => write!(f, "!{a}"),
            Formula::Next(a) => write!(f, "X {a}"),
            Formula::Globally(a) => write!(f, "G {a}"),
            Formula::Eventually(a) => write!(f, "F {a}"),
            Formula::And(a, b) => write!(f, "({a} & {b})"),
            Formula::Or(a, b) => write!(f, "({a} | {b})"),
            Formula::Implies(a, b) => write!(f, "({a} -> {b})"),
            Formula::Iff(a, b) => write!(f, "({a} <-> {b})"),
            Formula::Until(a, b) => write!(f, "({a} U {b})"),
            Formula::Release(a, b) => write!(f, "({a} R {b})"),
            Formula::WeakUntil(a, b) => write!(f, "({a} W {b})"),
        }
    }
}

impl fmt::Debug for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Formula({self})")
    }
}

impl Serialize for Formula {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Formula {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let text = String::deserialize(deserializer)?;
        parse_infix(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atom_name_validation() {
        assert!(AtomName::new("p").is_ok());
        assert!(AtomName::new("_x9").is_ok());
        assert_eq!(AtomName::new(""), Err(AtomNameError::Empty));
        assert!(matches!(AtomName::new("9p"), Err(AtomNameError::InvalidCharacters(_))));
        assert!(matches!(AtomName::new("P"), Err(AtomNameError::InvalidCharacters(_))));
        assert!(matches!(AtomName::new("until"), Err(AtomNameError::Reserved(_))));
        assert!(matches!(AtomName::new("state"), Err(AtomNameError::Reserved(_))));
    }

    #[test]
    fn paths_and_replacement() {
        let f = Formula::globally(Formula::implies(Formula::atom("p"), Formula::eventually(Formula::atom("q"))));
        assert_eq!(f.paths().len(), 5);
        assert_eq!(f.subterm(&[0, 1, 0]), Some(&Formula::atom("q")));
        let g = f.replace_at(&[0, 1, 0], Formula::atom("r")).unwrap();
        assert_eq!(g.to_string(), "G (p -> F r)");
        assert!(f.replace_at(&[1], Formula::True).is_none());
    }

    #[test]
    fn display_is_fully_parenthesized() {
        let f = Formula::or(Formula::and(Formula::atom("p"), Formula::atom("q")), Formula::not(Formula::atom("r")));
        assert_eq!(f.to_string(), "((p & q) | !r)");
    }
}

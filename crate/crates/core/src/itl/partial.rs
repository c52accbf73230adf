use std::collections::BTreeSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::ltl::{AtomName, Formula, Kind};

/// A parse tree that stopped early: complete subtrees, operator nodes whose
/// operands are still being parsed, and `Hole` placeholders at the point of
/// failure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum PartialFormula {
    Complete(Formula),
    Hole,
    /// An operator node with at least one incomplete child. Arity matches
    /// `kind`.
    Node { kind: Kind, children: Vec<PartialFormula> },
}

impl PartialFormula {
    pub(crate) fn node(kind: Kind, children: Vec<PartialFormula>) -> Self {
        debug_assert_eq!(kind.arity(), children.len());
        if children.iter().all(|c| matches!(c, PartialFormula::Complete(_))) {
            let kids = children
                .into_iter()
                .map(|c| match c {
                    PartialFormula::Complete(f) => f,
                    _ => unreachable!(),
                })
                .collect();
            return PartialFormula::Complete(Formula::from_kind(kind, None, kids).expect("arity"));
        }
        PartialFormula::Node { kind, children }
    }

    pub fn is_hole(&self) -> bool {
        matches!(self, PartialFormula::Hole)
    }

    /// Paths to every hole, in left-to-right order.
    pub fn holes(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.collect_holes(&mut Vec::new(), &mut out);
        out
    }

    fn collect_holes(&self, prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        match self {
            PartialFormula::Hole => out.push(prefix.clone()),
            PartialFormula::Complete(_) => {}
            PartialFormula::Node { children, .. } => {
                for (i, c) in children.iter().enumerate() {
                    prefix.push(i);
                    c.collect_holes(prefix, out);
                    prefix.pop();
                }
            }
        }
    }

    /// Replaces the hole at `path` with `f`. Returns `None` if `path` does not
    /// address a hole.
    pub fn fill(&self, path: &[usize], f: Formula) -> Option<PartialFormula> {
        match (self, path.split_first()) {
            (PartialFormula::Hole, None) => Some(PartialFormula::Complete(f)),
            (PartialFormula::Node { kind, children }, Some((&i, rest))) => {
                let mut kids = children.clone();
                kids[i] = kids.get(i)?.fill(rest, f)?;
                Some(PartialFormula::node(*kind, kids))
            }
            _ => None,
        }
    }

    pub fn as_complete(&self) -> Option<&Formula> {
        match self {
            PartialFormula::Complete(f) => Some(f),
            _ => None,
        }
    }

    /// Atoms appearing in the completed parts.
    pub fn atoms(&self) -> BTreeSet<AtomName> {
        match self {
            PartialFormula::Complete(f) => f.atoms(),
            PartialFormula::Hole => BTreeSet::new(),
            PartialFormula::Node { children, .. } => children.iter().flat_map(|c| c.atoms()).collect(),
        }
    }
}

impl fmt::Display for PartialFormula {
    /// Serialized keyword text with holes rendered as `□`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&super::serialize::serialize_partial(self, "□"))
    }
}

impl Serialize for PartialFormula {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

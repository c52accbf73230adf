use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AtomName, Formula};

/// Complexity band of a formula by AST depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stratum {
    /// depth 1–4
    Simple,
    /// depth 5–8
    Medium,
    /// depth 9–12
    High,
    /// depth 13 and up
    VeryHigh,
}

impl Stratum {
    pub const ALL: [Stratum; 4] = [Stratum::Simple, Stratum::Medium, Stratum::High, Stratum::VeryHigh];

    pub fn of_depth(depth: usize) -> Stratum {
        match depth {
            0..=4 => Stratum::Simple,
            5..=8 => Stratum::Medium,
            9..=12 => Stratum::High,
            _ => Stratum::VeryHigh,
        }
    }

    /// Inclusive depth range; `VeryHigh` is open-ended and reported as `13..=usize::MAX`.
    pub fn depth_range(self) -> (usize, usize) {
        match self {
            Stratum::Simple => (1, 4),
            Stratum::Medium => (5, 8),
            Stratum::High => (9, 12),
            Stratum::VeryHigh => (13, usize::MAX),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Stratum::Simple => "simple",
            Stratum::Medium => "medium",
            Stratum::High => "high",
            Stratum::VeryHigh => "very_high",
        }
    }
}

impl fmt::Display for Stratum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaStats {
    pub ast_depth: usize,
    pub node_count: usize,
    pub atoms: BTreeSet<AtomName>,
    pub stratum: Stratum,
}

/// Leaves have depth 1; an internal node is one deeper than its deepest child.
pub fn stats(f: &Formula) -> FormulaStats {
    let ast_depth = f.depth();
    FormulaStats {
        ast_depth,
        node_count: f.node_count(),
        atoms: f.atoms(),
        stratum: Stratum::of_depth(ast_depth),
    }
}

//! Generalized Büchi automata for LTL.
//!
//! [`ltl_to_gba`] runs the classical tableau (node expansion over
//! `new / old / next` obligation sets) on a formula in negation normal form
//! and yields a transition-based generalized Büchi automaton with one
//! acceptance set per `U` subformula. [`degeneralize`] reduces that to a
//! single acceptance set, and [`is_empty`] decides emptiness with a nested
//! depth-first search, returning a lasso-shaped witness when the language is
//! non-empty. [`evaluate_on_lasso`] checks a formula directly on such a lasso
//! and does not use any automaton.

mod bitset;
mod degeneralize;
mod emptiness;
mod lasso;
mod tableau;

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ltl::AtomName;

pub use degeneralize::degeneralize;
pub use emptiness::{accepts_lasso, is_empty, is_empty_on_the_fly, EmptinessResult};
pub use lasso::{evaluate_on_lasso, Event, LassoWitness};
pub use tableau::{ltl_to_gba, ltl_to_gba_bounded, TableauError};

pub type StateId = usize;

/// A conjunction of literals. Atoms in neither set are unconstrained.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct SymbolicLabel {
    pub required: BTreeSet<AtomName>,
    pub forbidden: BTreeSet<AtomName>,
}

impl SymbolicLabel {
    /// `None` if some atom would be both required and forbidden.
    pub fn new(required: BTreeSet<AtomName>, forbidden: BTreeSet<AtomName>) -> Option<Self> {
        required.is_disjoint(&forbidden).then_some(SymbolicLabel { required, forbidden })
    }

    pub fn is_true(&self) -> bool {
        self.required.is_empty() && self.forbidden.is_empty()
    }

    pub fn matches(&self, event: &Event) -> bool {
        self.required.is_subset(event) && self.forbidden.is_disjoint(event)
    }

    /// The smallest event satisfying the label.
    pub fn minimal_event(&self) -> Event {
        self.required.clone()
    }
}

impl fmt::Display for SymbolicLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_true() {
            return f.write_str("1");
        }
        let lits: Vec<String> = self
            .required
            .iter()
            .map(|a| a.to_string())
            .chain(self.forbidden.iter().map(|a| format!("!{a}")))
            .collect();
        f.write_str(&lits.join(" & "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    pub label: SymbolicLabel,
}

/// Transition-based generalized Büchi automaton.
///
/// A run reads one event per edge; it is accepting when it uses edges from
/// every acceptance set infinitely often. With no acceptance sets every
/// infinite run accepts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GenBuchiAutomaton {
    pub atoms: BTreeSet<AtomName>,
    pub num_states: usize,
    pub initial: Vec<StateId>,
    pub edges: Vec<Edge>,
    /// Each set holds edge indices, sorted.
    pub acceptance_sets: Vec<Vec<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutomatonError {
    #[error("edge {edge} references undeclared state {state}")]
    DanglingEdge { edge: usize, state: StateId },
    #[error("initial state {0} is undeclared")]
    DanglingInitial(StateId),
    #[error("acceptance set {set} references missing edge {edge}")]
    DanglingAcceptance { set: usize, edge: usize },
}

impl GenBuchiAutomaton {
    pub fn validate(&self) -> Result<(), AutomatonError> {
        if let Some(&s) = self.initial.iter().find(|s| **s >= self.num_states) {
            return Err(AutomatonError::DanglingInitial(s));
        }
        for (i, e) in self.edges.iter().enumerate() {
            for s in [e.src, e.dst] {
                if s >= self.num_states {
                    return Err(AutomatonError::DanglingEdge { edge: i, state: s });
                }
            }
        }
        for (set, edges) in self.acceptance_sets.iter().enumerate() {
            if let Some(&edge) = edges.iter().find(|e| **e >= self.edges.len()) {
                return Err(AutomatonError::DanglingAcceptance { set, edge });
            }
        }
        Ok(())
    }

    /// Outgoing edge indices per state, in edge order.
    pub fn successors(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.num_states];
        for (i, e) in self.edges.iter().enumerate() {
            out[e.src].push(i);
        }
        out
    }

    /// `membership[e][k]` is true when edge `e` belongs to acceptance set `k`.
    pub(crate) fn membership(&self) -> Vec<Vec<bool>> {
        let mut m = vec![vec![false; self.acceptance_sets.len()]; self.edges.len()];
        for (k, set) in self.acceptance_sets.iter().enumerate() {
            for &e in set {
                m[e][k] = true;
            }
        }
        m
    }
}

/// Text dump for debugging:
///
/// ```text
/// atoms: p q
/// states: 2
/// initial: 0
/// acceptance-sets: 1
/// 0 -> 1 [p & !q] {0}
/// ```
///
/// Each edge line lists `src -> dst [label]` followed by the acceptance sets
/// the edge belongs to.
impl fmt::Display for GenBuchiAutomaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<&str> = self.atoms.iter().map(|a| a.as_str()).collect();
        writeln!(f, "atoms: {}", atoms.join(" "))?;
        writeln!(f, "states: {}", self.num_states)?;
        let init: Vec<String> = self.initial.iter().map(|s| s.to_string()).collect();
        writeln!(f, "initial: {}", init.join(" "))?;
        writeln!(f, "acceptance-sets: {}", self.acceptance_sets.len())?;
        let membership = self.membership();
        for (i, e) in self.edges.iter().enumerate() {
            let sets: Vec<String> = membership[i]
                .iter()
                .enumerate()
                .filter(|(_, m)| **m)
                .map(|(k, _)| k.to_string())
                .collect();
            writeln!(f, "{} -> {} [{}] {{{}}}", e.src, e.dst, e.label, sets.join(" "))?;
        }
        Ok(())
    }
}

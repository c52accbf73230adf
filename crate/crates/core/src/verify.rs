//! Satisfiability, non-triviality and equivalence of LTL formulas.
//!
//! Every check reduces to emptiness of the automaton for some formula in
//! negation normal form. The automaton is explored on the fly (see
//! [`automata::is_empty_on_the_fly`]), so satisfiable inputs usually finish
//! before the tableau is complete. [`Checker`] can cap the tableau size;
//! the free functions run without a cap.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::automata::{self, evaluate_on_lasso, Event, LassoWitness, TableauError};
use crate::itl::{self, ParseError};
use crate::ltl::{to_nnf, AtomName, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("verification gave up: automaton exceeds {limit} edges")]
    TooLarge { limit: usize },
}

impl From<TableauError> for VerifyError {
    fn from(e: TableauError) -> Self {
        match e {
            TableauError::TooLarge { limit } => VerifyError::TooLarge { limit },
            TableauError::NotNnf(f) => unreachable!("checker always normalizes first: {f}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    ParseFailure { error: ParseError },
    Unsatisfiable,
    TrivialValid,
    Verified,
}

impl VerdictKind {
    pub fn name(&self) -> &'static str {
        match self {
            VerdictKind::ParseFailure { .. } => "parse_failure",
            VerdictKind::Unsatisfiable => "unsatisfiable",
            VerdictKind::TrivialValid => "trivial_valid",
            VerdictKind::Verified => "verified",
        }
    }
}

/// Outcome of [`classify`] / [`is_nontrivial`].
///
/// `witness` is a trace satisfying the formula, `counter_witness` one
/// falsifying it. A `Verified` verdict carries both.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<LassoWitness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counter_witness: Option<LassoWitness>,
}

impl Verdict {
    fn bare(kind: VerdictKind) -> Self {
        Verdict { kind, witness: None, counter_witness: None }
    }

    pub fn is_verified(&self) -> bool {
        self.kind == VerdictKind::Verified
    }

    pub fn parses(&self) -> bool {
        !matches!(self.kind, VerdictKind::ParseFailure { .. })
    }

    /// True for every verdict except `Unsatisfiable` and parse failures.
    pub fn is_satisfiable(&self) -> bool {
        matches!(self.kind, VerdictKind::TrivialValid | VerdictKind::Verified)
    }

    /// Checks the witnesses against `f` by direct evaluation.
    pub fn witnesses_hold(&self, f: &Formula) -> bool {
        let sat = self.witness.as_ref().is_none_or(|w| evaluate_on_lasso(f, w));
        let unsat = self.counter_witness.as_ref().is_none_or(|w| !evaluate_on_lasso(f, w));
        sat && unsat
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            VerdictKind::ParseFailure { error } => write!(f, "parse_failure: {error}"),
            k => f.write_str(k.name()),
        }
    }
}

/// Runs the checks, optionally bounding the size of every automaton.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Checker {
    /// Give up with [`VerifyError::TooLarge`] past this many tableau edges.
    pub max_edges: Option<usize>,
}

impl Checker {
    pub fn unbounded() -> Self {
        Checker { max_edges: None }
    }

    pub fn bounded(max_edges: usize) -> Self {
        Checker { max_edges: Some(max_edges) }
    }

    pub fn is_satisfiable(&self, f: &Formula) -> Result<(bool, Option<LassoWitness>), VerifyError> {
        let r = automata::is_empty_on_the_fly(&to_nnf(f), self.max_edges.unwrap_or(usize::MAX))?;
        Ok((!r.empty, r.witness))
    }

    /// Satisfiability first, then validity (unsatisfiability of `!f`).
    pub fn is_nontrivial(&self, f: &Formula) -> Result<Verdict, VerifyError> {
        let (sat, witness) = self.is_satisfiable(f)?;
        if !sat {
            return Ok(Verdict::bare(VerdictKind::Unsatisfiable));
        }
        let (falsifiable, counter_witness) = self.is_satisfiable(&Formula::not(f.clone()))?;
        if !falsifiable {
            return Ok(Verdict { kind: VerdictKind::TrivialValid, witness, counter_witness: None });
        }
        Ok(Verdict { kind: VerdictKind::Verified, witness, counter_witness })
    }

    pub fn are_equivalent(&self, f1: &Formula, f2: &Formula) -> Result<bool, VerifyError> {
        Ok(self.separating_witness(f1, f2)?.is_none())
    }

    /// A trace on which exactly one of `f1`, `f2` holds, or `None` when they
    /// are equivalent. Structurally equal formulas are equivalent without
    /// building any automaton; otherwise a few hundred seeded random lassos
    /// are evaluated directly before the automata for `f1 & !f2` and
    /// `!f1 & f2` are searched.
    pub fn separating_witness(&self, f1: &Formula, f2: &Formula) -> Result<Option<LassoWitness>, VerifyError> {
        if f1 == f2 {
            return Ok(None);
        }
        if let Some(w) = sample_separating_lasso(f1, f2) {
            return Ok(Some(w));
        }
        for diff in [
            Formula::and(f1.clone(), Formula::not(f2.clone())),
            Formula::and(Formula::not(f1.clone()), f2.clone()),
        ] {
            if let (true, w) = self.is_satisfiable(&diff)? {
                return Ok(w);
            }
        }
        Ok(None)
    }

    pub fn classify(&self, candidate: &str) -> Result<Verdict, VerifyError> {
        match itl::parse(candidate) {
            Ok(f) => self.is_nontrivial(&f),
            Err(error) => Ok(Verdict::bare(VerdictKind::ParseFailure { error })),
        }
    }
}

/// Seeded random lassos tried before building automata for an equivalence
/// check. A hit is a genuine separating trace; a miss decides nothing.
const SAMPLED_LASSOS: usize = 256;

fn sample_separating_lasso(f1: &Formula, f2: &Formula) -> Option<LassoWitness> {
    let atoms: Vec<AtomName> = f1.atoms().union(&f2.atoms()).cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a55);
    let event = |rng: &mut ChaCha8Rng| -> Event { atoms.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect() };
    for _ in 0..SAMPLED_LASSOS {
        let prefix = (0..rng.gen_range(0..=3)).map(|_| event(&mut rng)).collect();
        let loop_ = (0..rng.gen_range(1..=4)).map(|_| event(&mut rng)).collect();
        let w = LassoWitness::new(prefix, loop_);
        if evaluate_on_lasso(f1, &w) != evaluate_on_lasso(f2, &w) {
            return Some(w);
        }
    }
    None
}

fn unbounded<T>(r: Result<T, VerifyError>) -> T {
    match r {
        Ok(v) => v,
        Err(e) => unreachable!("no limit was set: {e}"),
    }
}

/// Whether some trace satisfies `f`; a satisfying lasso is returned when one
/// exists.
pub fn is_satisfiable(f: &Formula) -> (bool, Option<LassoWitness>) {
    unbounded(Checker::unbounded().is_satisfiable(f))
}

/// `Unsatisfiable`, `TrivialValid` or `Verified`.
pub fn is_nontrivial(f: &Formula) -> Verdict {
    unbounded(Checker::unbounded().is_nontrivial(f))
}

/// Language equality over the union of both formulas' atoms.
pub fn are_equivalent(f1: &Formula, f2: &Formula) -> bool {
    unbounded(Checker::unbounded().are_equivalent(f1, f2))
}

/// See [`Checker::separating_witness`].
pub fn separating_witness(f1: &Formula, f2: &Formula) -> Option<LassoWitness> {
    unbounded(Checker::unbounded().separating_witness(f1, f2))
}

/// Parses an ITL candidate and classifies it. This is the filter applied to
/// generated candidates: only `Verified` ones are kept.
pub fn classify(candidate: &str) -> Verdict {
    unbounded(Checker::unbounded().classify(candidate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_infix;

    fn f(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    #[test]
    fn satisfiability() {
        assert!(!is_satisfiable(&f("p & !p")).0);
        assert!(!is_satisfiable(&f("(p U q) & G !q")).0);
        let (sat, w) = is_satisfiable(&f("G F p"));
        assert!(sat);
        assert!(w.unwrap().loop_.iter().any(|e| e.contains(&crate::ltl::AtomName::new("p").unwrap())));
    }

    #[test]
    fn nontriviality() {
        assert_eq!(is_nontrivial(&f("p | !p")).kind, VerdictKind::TrivialValid);
        assert_eq!(is_nontrivial(&f("F p & G !p")).kind, VerdictKind::Unsatisfiable);
        assert_eq!(is_nontrivial(&f("0")).kind, VerdictKind::Unsatisfiable);
        let v = is_nontrivial(&f("p"));
        assert!(v.is_verified());
        assert!(v.witness.is_some() && v.counter_witness.is_some());
        assert!(v.witnesses_hold(&f("p")));
    }

    #[test]
    fn equivalence() {
        assert!(are_equivalent(&f("F p"), &f("1 U p")));
        assert!(!are_equivalent(&f("p U q"), &f("p W q")));
        let w = separating_witness(&f("p U q"), &f("p W q")).unwrap();
        assert_ne!(evaluate_on_lasso(&f("p U q"), &w), evaluate_on_lasso(&f("p W q"), &w));
    }

    #[test]
    fn classification() {
        assert!(matches!(classify("always, (p and").kind, VerdictKind::ParseFailure { .. }));
        assert_eq!(classify("(p or not p)").kind, VerdictKind::TrivialValid);
        assert_eq!(classify("always, (if p, then eventually, q)").kind, VerdictKind::Verified);
    }

    #[test]
    fn bounded_checker_gives_up() {
        let big = f("G (p -> F (q & X F (r & X F s))) & G (q -> F (p U (r R s)))");
        assert_eq!(Checker::bounded(3).is_nontrivial(&big), Err(VerifyError::TooLarge { limit: 3 }));
    }

    #[test]
    fn verdict_json() {
        let v = Verdict::bare(VerdictKind::TrivialValid);
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"kind":"trivial_valid"}"#);
    }
}

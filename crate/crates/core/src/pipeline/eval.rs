use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::itl;
use crate::ltl::{stats, Formula, Kind, Stratum};
use crate::repair::{self, RepairConfig, RepairStatus};
use crate::verify::{Checker, VerdictKind, VerifyError};

use super::DatasetRecord;

/// Why a verified candidate differs from its reference.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchClass {
    ScopeError,
    OperatorMismatch,
    AtomError,
    Other,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MismatchError {
    #[error("formulas are equivalent")]
    Equivalent,
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

fn kind_counts(f: &Formula) -> [usize; Kind::ALL.len()] {
    let mut counts = [0; Kind::ALL.len()];
    for p in f.paths() {
        counts[f.subterm(&p).expect("path").kind().index()] += 1;
    }
    counts
}

/// Classification without the equivalence precondition check.
pub(crate) fn mismatch_class(generated: &Formula, reference: &Formula) -> MismatchClass {
    if generated.atoms() != reference.atoms() {
        return MismatchClass::AtomError;
    }
    let (g, r) = (kind_counts(generated), kind_counts(reference));
    if g == r {
        return MismatchClass::ScopeError;
    }
    let temporal_binary = |i: usize| matches!(Kind::ALL[i], Kind::Until | Kind::WeakUntil | Kind::Release);
    if (0..g.len()).all(|i| temporal_binary(i) || g[i] == r[i]) {
        return MismatchClass::OperatorMismatch;
    }
    MismatchClass::Other
}

/// In order: `AtomError` when the atom sets differ, `OperatorMismatch` when
/// node-kind counts differ only in `U`/`W`/`R`, `ScopeError` when the
/// node-kind counts are equal, else `Other`. Rejects equivalent pairs.
pub fn classify_mismatch(generated: &Formula, reference: &Formula) -> Result<MismatchClass, MismatchError> {
    if Checker::unbounded().are_equivalent(generated, reference)? {
        return Err(MismatchError::Equivalent);
    }
    Ok(mismatch_class(generated, reference))
}

/// Default tableau cap for evaluation checks.
pub const DEFAULT_EVAL_MAX_EDGES: usize = 500_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EvalConfig {
    pub budget_m: usize,
    /// Measure after repair (default) or on the raw candidates.
    pub repair: bool,
    /// Tableau cap for every check. A check that exceeds it counts against
    /// the candidate (unsatisfiable, or inequivalent) and the candidate is
    /// counted as undecided.
    pub max_edges: Option<usize>,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig { budget_m: repair::DEFAULT_BUDGET, repair: true, max_edges: Some(DEFAULT_EVAL_MAX_EDGES) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("candidate id `{0}` has no reference")]
    UnknownId(String),
    #[error("candidate id `{0}` appears twice")]
    DuplicateCandidate(String),
    #[error("reference `{id}` is invalid: {reason}")]
    BadReference { id: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct Counts {
    pub candidates: usize,
    pub parsed: usize,
    pub satisfiable: usize,
    pub verified: usize,
    pub equivalent: usize,
    /// Candidates for which some check hit the tableau cap.
    pub undecided: usize,
}

impl std::ops::AddAssign for Counts {
    fn add_assign(&mut self, o: Counts) {
        self.candidates += o.candidates;
        self.parsed += o.parsed;
        self.satisfiable += o.satisfiable;
        self.verified += o.verified;
        self.equivalent += o.equivalent;
        self.undecided += o.undecided;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metrics {
    pub sem_eq: f64,
    pub syn_corr: f64,
    /// Among parsed candidates.
    pub sat: f64,
    /// Among satisfiable candidates.
    pub non_triv: f64,
    /// Fraction of all candidates that verify.
    pub pass_rate: f64,
    pub counts: Counts,
}

fn ratio(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        n as f64 / d as f64
    }
}

impl Metrics {
    fn from_counts(c: Counts) -> Self {
        Metrics {
            sem_eq: ratio(c.equivalent, c.candidates),
            syn_corr: ratio(c.parsed, c.candidates),
            sat: ratio(c.satisfiable, c.parsed),
            non_triv: ratio(c.verified, c.satisfiable),
            pass_rate: ratio(c.verified, c.candidates),
            counts: c,
        }
    }

    /// `|pass_rate - syn_corr * sat * non_triv|`.
    pub fn product_gap(&self) -> f64 {
        (self.pass_rate - self.syn_corr * self.sat * self.non_triv).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub overall: Metrics,
    /// Strata with at least one candidate.
    pub strata: BTreeMap<Stratum, Metrics>,
    /// Verdict kinds of inequivalent candidates, as fractions of them.
    pub filter_breakdown: BTreeMap<String, f64>,
    /// Classes of verified candidates proved inequivalent, as fractions of
    /// them.
    pub mismatch_breakdown: BTreeMap<MismatchClass, f64>,
    /// Candidate ids per mismatch class.
    pub mismatches: BTreeMap<MismatchClass, Vec<String>>,
}

impl EvalReport {
    /// Largest product-rule gap over the overall and per-stratum metrics.
    pub fn product_gap(&self) -> f64 {
        self.strata.values().chain([&self.overall]).map(Metrics::product_gap).fold(0.0, f64::max)
    }
}

struct Scored {
    counts: Counts,
    kind: &'static str,
    mismatch: Option<MismatchClass>,
}

fn score(reference: &Formula, candidate: &str, cfg: &EvalConfig, checker: &Checker) -> Scored {
    let mut text = candidate.to_string();
    if cfg.repair {
        let rc = RepairConfig { budget: cfg.budget_m, max_edges: cfg.max_edges.unwrap_or(usize::MAX), ..Default::default() };
        let out = repair::repair_with(candidate, &rc);
        if out.status != RepairStatus::Failed {
            text = out.result.expect("successful repair has a result").source;
        }
    }
    let mut c = Counts { candidates: 1, ..Counts::default() };
    let Ok(f) = itl::parse(&text) else {
        return Scored { counts: c, kind: "parse_failure", mismatch: None };
    };
    c.parsed = 1;
    let kind = match checker.is_nontrivial(&f) {
        Ok(v) => v.kind,
        Err(_) => {
            c.undecided = 1;
            VerdictKind::Unsatisfiable
        }
    };
    c.satisfiable = usize::from(matches!(kind, VerdictKind::TrivialValid | VerdictKind::Verified));
    c.verified = usize::from(kind == VerdictKind::Verified);
    c.equivalent = match checker.are_equivalent(&f, reference) {
        Ok(eq) => usize::from(eq),
        Err(_) => {
            c.undecided = 1;
            0
        }
    };
    let mismatch = (c.verified == 1 && c.equivalent == 0 && c.undecided == 0).then(|| mismatch_class(&f, reference));
    Scored { counts: c, kind: kind.name(), mismatch }
}

fn fractions<K: Ord + Clone>(counts: &BTreeMap<K, usize>) -> BTreeMap<K, f64> {
    let total: usize = counts.values().sum();
    counts.iter().map(|(k, n)| (k.clone(), ratio(*n, total))).collect()
}

/// Scores `candidates` (id, keyword text) against their references.
///
/// Each candidate is repaired first unless `cfg.repair` is off. Strata
/// follow the reference depth. All aggregates are sums of per-candidate
/// counts, so the report does not depend on candidate order.
pub fn evaluate(
    refs: &[DatasetRecord],
    candidates: &[(String, String)],
    cfg: &EvalConfig,
) -> Result<EvalReport, EvalError> {
    let by_id: HashMap<&str, &DatasetRecord> = refs.iter().map(|r| (r.id.as_str(), r)).collect();
    let checker = Checker { max_edges: cfg.max_edges };
    let mut seen = HashMap::new();
    let mut overall = Counts::default();
    let mut strata: BTreeMap<Stratum, Counts> = BTreeMap::new();
    let mut kinds: BTreeMap<String, usize> = BTreeMap::new();
    let mut classes: BTreeMap<MismatchClass, usize> = BTreeMap::new();
    let mut mismatches: BTreeMap<MismatchClass, Vec<String>> = BTreeMap::new();
    for (id, text) in candidates {
        let reference = by_id.get(id.as_str()).ok_or_else(|| EvalError::UnknownId(id.clone()))?;
        if seen.insert(id.as_str(), ()).is_some() {
            return Err(EvalError::DuplicateCandidate(id.clone()));
        }
        let rf = reference.formula().map_err(|e| EvalError::BadReference { id: id.clone(), reason: e.to_string() })?;
        let s = score(&rf, text, cfg, &checker);
        overall += s.counts;
        *strata.entry(stats(&rf).stratum).or_default() += s.counts;
        if s.counts.equivalent == 0 {
            *kinds.entry(s.kind.to_string()).or_default() += 1;
        }
        if let Some(m) = s.mismatch {
            *classes.entry(m).or_default() += 1;
            mismatches.entry(m).or_default().push(id.clone());
        }
    }
    mismatches.values_mut().for_each(|ids| ids.sort());
    Ok(EvalReport {
        overall: Metrics::from_counts(overall),
        strata: strata.into_iter().map(|(s, c)| (s, Metrics::from_counts(c))).collect(),
        filter_breakdown: fractions(&kinds),
        mismatch_breakdown: fractions(&classes),
        mismatches,
    })
}

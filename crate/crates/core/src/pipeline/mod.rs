//! Datasets, corpus generation, filtering, explanation and evaluation.
//!
//! Records travel as newline-delimited JSON ([`DatasetRecord`]). A synthetic
//! corpus comes from [`generate_corpus`]; [`ingest`] validates any corpus
//! file. [`run_filter`] applies the classify-then-repair cascade to
//! candidate strings, [`evaluate`] scores candidates against references and
//! [`explain`] renders a formula as an English sentence grounded in a
//! [`DomainContext`].

mod context;
mod corpus;
mod eval;
mod explain;
mod record;

use serde::{Deserialize, Serialize};

pub use context::{ContextError, DomainContext};
pub use corpus::{generate_corpus, CorpusError, DEFAULT_COUNTS, SCREEN_MAX_EDGES, VERY_HIGH_MAX_DEPTH};
pub use eval::{
    classify_mismatch, evaluate, Counts, EvalConfig, DEFAULT_EVAL_MAX_EDGES, EvalError, EvalReport, Metrics, MismatchClass, MismatchError,
};
pub use explain::{explain, ExplainError, CONDITIONAL_GROUP};
pub use record::{ingest, ingest_reader, DatasetRecord, IngestError, IngestIssue, IngestMode, Ingested, RecordError};

use crate::repair::{self, RepairConfig, RepairOutcome};
use crate::verify::{self, Verdict};

/// A candidate line: `{"id": "...", "candidate": "..."}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub id: String,
    pub candidate: String,
}

/// Filter result for one candidate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FilterRecord {
    pub id: String,
    /// Verdict on the candidate as given.
    pub verdict: Verdict,
    /// Cost-0 passthrough for verified candidates.
    pub repair: RepairOutcome,
}

/// Classifies each candidate and repairs the ones that fail, in input order.
pub fn run_filter(candidates: &[(String, String)], budget_m: usize) -> Vec<FilterRecord> {
    let cfg = RepairConfig { budget: budget_m, ..RepairConfig::default() };
    candidates
        .iter()
        .map(|(id, text)| {
            let verdict = verify::classify(text);
            let repair = repair::repair_classified(text, verdict.clone(), &cfg);
            FilterRecord { id: id.clone(), verdict, repair }
        })
        .collect()
}

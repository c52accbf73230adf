use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::itl;
use crate::ltl::{parse_infix, AtomName, Formula};
use crate::verify;

use super::DomainContext;

/// One line of a dataset file.
///
/// ```json
/// {"id":"simple-0000","requirement":"Eventually, the door is open.","domain":"home",
///  "context":{"p":"the door is open"},"itl":"eventually, p","ltl":"F p","depth":2}
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawRecord", into = "RawRecord")]
pub struct DatasetRecord {
    pub id: String,
    pub requirement: String,
    pub context: DomainContext,
    /// Canonical keyword-language text.
    pub itl: String,
    /// Reference formula in infix syntax.
    pub ltl: String,
    pub depth: usize,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRecord {
    id: String,
    requirement: String,
    domain: String,
    context: BTreeMap<AtomName, String>,
    itl: String,
    ltl: String,
    depth: usize,
}

impl TryFrom<RawRecord> for DatasetRecord {
    type Error = super::ContextError;

    fn try_from(r: RawRecord) -> Result<Self, Self::Error> {
        Ok(DatasetRecord {
            id: r.id,
            requirement: r.requirement,
            context: DomainContext::new(r.domain, r.context)?,
            itl: r.itl,
            ltl: r.ltl,
            depth: r.depth,
        })
    }
}

impl From<DatasetRecord> for RawRecord {
    fn from(r: DatasetRecord) -> Self {
        RawRecord {
            id: r.id,
            requirement: r.requirement,
            domain: r.context.domain_label().to_string(),
            context: r.context.definitions().clone(),
            itl: r.itl,
            ltl: r.ltl,
            depth: r.depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("itl does not parse: {0}")]
    ItlParse(String),
    #[error("itl is not in canonical form; expected {expected:?}")]
    NotCanonical { expected: String },
    #[error("ltl does not parse: {0}")]
    LtlParse(String),
    #[error("itl and ltl are not equivalent")]
    Inconsistent,
    #[error("stored depth {stored} differs from computed depth {computed}")]
    DepthMismatch { stored: usize, computed: usize },
    #[error("atom `{0}` has no definition in the context")]
    Ungrounded(AtomName),
}

impl DatasetRecord {
    /// The reference formula, parsed from `itl`.
    pub fn formula(&self) -> Result<Formula, RecordError> {
        itl::parse(&self.itl).map_err(|e| RecordError::ItlParse(e.to_string()))
    }

    /// Checks the record invariants and returns the parsed formula.
    pub fn validate(&self) -> Result<Formula, RecordError> {
        let f = self.formula()?;
        let canonical = itl::serialize(&f);
        if canonical != self.itl {
            return Err(RecordError::NotCanonical { expected: canonical });
        }
        let g = parse_infix(&self.ltl).map_err(|e| RecordError::LtlParse(e.to_string()))?;
        if !verify::are_equivalent(&f, &g) {
            return Err(RecordError::Inconsistent);
        }
        if f.depth() != self.depth {
            return Err(RecordError::DepthMismatch { stored: self.depth, computed: f.depth() });
        }
        if let Some(a) = f.atoms().into_iter().find(|a| self.context.describe(a).is_none()) {
            return Err(RecordError::Ungrounded(a));
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IngestMode {
    /// Stop at the first invalid line.
    #[default]
    Strict,
    /// Skip invalid lines and report them.
    Lenient,
}

/// An invalid line. Line numbers start at 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestIssue {
    pub line: usize,
    pub id: Option<String>,
    pub reason: String,
}

impl std::fmt::Display for IngestIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match &self.id {
            Some(id) => write!(f, "line {} (id {id}): {}", self.line, self.reason),
            None => write!(f, "line {}: {}", self.line, self.reason),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read dataset: {0}")]
    Io(#[from] io::Error),
    #[error("invalid record at {0}")]
    Invalid(IngestIssue),
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ingested {
    pub records: Vec<DatasetRecord>,
    /// Lines skipped in lenient mode.
    pub skipped: Vec<IngestIssue>,
}

/// Reads a newline-delimited JSON dataset. Blank lines are ignored; ids must
/// be unique.
pub fn ingest(path: impl AsRef<Path>, mode: IngestMode) -> Result<Ingested, IngestError> {
    ingest_reader(BufReader::new(File::open(path)?), mode)
}

/// [`ingest`] from any buffered reader.
pub fn ingest_reader(reader: impl BufRead, mode: IngestMode) -> Result<Ingested, IngestError> {
    let mut out = Ingested::default();
    let mut ids = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let issue = |id: Option<String>, reason: String| IngestIssue { line: i + 1, id, reason };
        let result = match serde_json::from_str::<DatasetRecord>(&line) {
            Err(e) => {
                let id = serde_json::from_str::<serde_json::Value>(&line)
                    .ok()
                    .and_then(|v| v.get("id").and_then(|x| x.as_str()).map(String::from));
                Err(issue(id, format!("schema violation: {e}")))
            }
            Ok(r) if !ids.insert(r.id.clone()) => Err(issue(Some(r.id.clone()), "duplicate id".into())),
            Ok(r) => match r.validate() {
                Ok(_) => Ok(r),
                Err(e) => Err(issue(Some(r.id.clone()), e.to_string())),
            },
        };
        match (result, mode) {
            (Ok(r), _) => out.records.push(r),
            (Err(issue), IngestMode::Strict) => return Err(IngestError::Invalid(issue)),
            (Err(issue), IngestMode::Lenient) => out.skipped.push(issue),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const GOOD: &str = r#"{"id":"a","requirement":"Eventually, door open.","domain":"home","context":{"p":"door open"},"itl":"eventually, p","ltl":"F p","depth":2}"#;

    fn read(text: &str, mode: IngestMode) -> Result<Ingested, IngestError> {
        ingest_reader(text.as_bytes(), mode)
    }

    #[test]
    fn valid_and_empty() {
        assert_eq!(read("", IngestMode::Strict).unwrap().records.len(), 0);
        let got = read(GOOD, IngestMode::Strict).unwrap();
        assert_eq!(got.records[0].context.domain_label(), "home");
        let back = serde_json::to_string(&got.records[0]).unwrap();
        assert_eq!(serde_json::from_str::<DatasetRecord>(&back).unwrap(), got.records[0]);
    }

    #[test]
    fn inconsistent_record_names_id() {
        let bad = GOOD.replace("\"F p\"", "\"G p\"").replace("\"a\"", "\"bad-7\"");
        match read(&bad, IngestMode::Strict) {
            Err(IngestError::Invalid(issue)) => {
                assert_eq!(issue.id.as_deref(), Some("bad-7"));
                assert!(issue.reason.contains("not equivalent"));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn lenient_skips_with_line_numbers() {
        let depth = GOOD.replace("\"depth\":2", "\"depth\":3").replace("\"a\"", "\"b\"");
        let text = format!("{GOOD}\n\nnot json\n{depth}\n{GOOD}\n");
        let got = read(&text, IngestMode::Lenient).unwrap();
        assert_eq!(got.records.len(), 1);
        let lines: Vec<usize> = got.skipped.iter().map(|s| s.line).collect();
        assert_eq!(lines, vec![3, 4, 5]);
        assert!(got.skipped[2].reason.contains("duplicate"));
        assert!(matches!(read(&text, IngestMode::Strict), Err(IngestError::Invalid(IngestIssue { line: 3, .. }))));
    }

    #[test]
    fn non_canonical_itl() {
        let loose = GOOD.replace("\"eventually, p\"", "\"eventually,   p\"");
        assert!(read(&loose, IngestMode::Strict).is_err());
    }
}

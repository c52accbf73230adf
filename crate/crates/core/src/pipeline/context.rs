use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::ltl::AtomName;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("context defines no atoms")]
    Empty,
    #[error("description of `{0}` is empty")]
    EmptyDescription(AtomName),
}

/// A domain label and a description for every atom.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawContext", into = "RawContext")]
pub struct DomainContext {
    domain_label: String,
    definitions: BTreeMap<AtomName, String>,
}

impl DomainContext {
    pub fn new(domain_label: impl Into<String>, definitions: BTreeMap<AtomName, String>) -> Result<Self, ContextError> {
        if definitions.is_empty() {
            return Err(ContextError::Empty);
        }
        if let Some((a, _)) = definitions.iter().find(|(_, d)| d.trim().is_empty()) {
            return Err(ContextError::EmptyDescription(a.clone()));
        }
        Ok(DomainContext { domain_label: domain_label.into(), definitions })
    }

    pub fn domain_label(&self) -> &str {
        &self.domain_label
    }

    pub fn definitions(&self) -> &BTreeMap<AtomName, String> {
        &self.definitions
    }

    pub fn describe(&self, atom: &AtomName) -> Option<&str> {
        self.definitions.get(atom).map(String::as_str)
    }

    pub fn atoms(&self) -> impl Iterator<Item = &AtomName> {
        self.definitions.keys()
    }
}

/// JSON shape: `{"domain": "...", "definitions": {"p": "..."}}`.
#[derive(Serialize, Deserialize)]
struct RawContext {
    domain: String,
    definitions: BTreeMap<AtomName, String>,
}

impl TryFrom<RawContext> for DomainContext {
    type Error = ContextError;

    fn try_from(raw: RawContext) -> Result<Self, Self::Error> {
        DomainContext::new(raw.domain, raw.definitions)
    }
}

impl From<DomainContext> for RawContext {
    fn from(c: DomainContext) -> Self {
        RawContext { domain: c.domain_label, definitions: c.definitions }
    }
}

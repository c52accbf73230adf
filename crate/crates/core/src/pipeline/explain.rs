use crate::itl::render_minimal_with;
use crate::ltl::{AtomName, Formula};

use super::DomainContext;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExplainError {
    #[error("atom `{0}` has no definition in the context")]
    Ungrounded(AtomName),
}

/// Written after `(` when a conditional has to be grouped.
pub const CONDITIONAL_GROUP: &str = "the following holds: ";

/// Keyword rendering of `f` with every atom replaced by its description.
///
/// Parentheses are kept only where the keyword grammar needs them; a grouped
/// conditional reads `(the following holds: if ..., then ...)`. The first
/// letter is capitalized and a period is appended.
///
/// ```
/// # use std::collections::BTreeMap;
/// use ltlbridge::ltl::{parse_infix, AtomName};
/// use ltlbridge::pipeline::{explain, DomainContext};
///
/// let ctx = DomainContext::new("automotive", BTreeMap::from([
///     (AtomName::new("q").unwrap(), "obstacle detection active".to_string()),
///     (AtomName::new("s").unwrap(), "the sensor is calibrated".to_string()),
/// ])).unwrap();
/// let f = parse_infix("G (q -> F s)").unwrap();
/// assert_eq!(
///     explain(&f, &ctx).unwrap(),
///     "Always, if obstacle detection active, then eventually, the sensor is calibrated."
/// );
/// ```
pub fn explain(f: &Formula, ctx: &DomainContext) -> Result<String, ExplainError> {
    if let Some(a) = f.atoms().into_iter().find(|a| ctx.describe(a).is_none()) {
        return Err(ExplainError::Ungrounded(a));
    }
    let text = render_minimal_with(f, &|a| ctx.describe(a).expect("checked").to_string(), CONDITIONAL_GROUP);
    let mut chars = text.chars();
    let mut out: String = match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    };
    out.push('.');
    Ok(out)
}

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::ltl::{AtomName, Formula};

/// The set of atoms true at one position of a trace.
pub type Event = BTreeSet<AtomName>;

/// The ultimately periodic trace `prefix · loop^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct LassoWitness {
    pub prefix: Vec<Event>,
    #[serde(rename = "loop")]
    pub loop_: Vec<Event>,
}

impl LassoWitness {
    pub fn new(prefix: Vec<Event>, loop_: Vec<Event>) -> Self {
        LassoWitness { prefix, loop_ }
    }

    /// Event at position `i` of the infinite trace.
    pub fn event_at(&self, i: usize) -> &Event {
        if i < self.prefix.len() {
            &self.prefix[i]
        } else {
            &self.loop_[(i - self.prefix.len()) % self.loop_.len()]
        }
    }

    fn positions(&self) -> usize {
        self.prefix.len() + self.loop_.len()
    }
}

fn fmt_event(f: &mut fmt::Formatter<'_>, e: &Event) -> fmt::Result {
    let atoms: Vec<&str> = e.iter().map(|a| a.as_str()).collect();
    write!(f, "{{{}}}", atoms.join(","))
}

/// `{p}{} ({q})^w`
impl fmt::Display for LassoWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.prefix {
            fmt_event(f, e)?;
        }
        if !self.prefix.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("(")?;
        for e in &self.loop_ {
            fmt_event(f, e)?;
        }
        f.write_str(")^w")
    }
}

/// Whether the trace denoted by `w` satisfies `f` at position 0.
///
/// Works directly on the `|prefix| + |loop|` distinct positions: each
/// subformula gets a truth vector, and the temporal operators are solved as
/// fixpoints along the successor function (the last position wraps to the
/// start of the loop). `U` and `F` take the least fixpoint, `R`, `W` and `G`
/// the greatest. An empty loop denotes no trace, so the result is `false`.
pub fn evaluate_on_lasso(f: &Formula, w: &LassoWitness) -> bool {
    if w.loop_.is_empty() {
        return false;
    }
    let n = w.positions();
    let succ: Vec<usize> = (0..n).map(|i| if i + 1 < n { i + 1 } else { w.prefix.len() }).collect();
    values(f, w, &succ)[0]
}

fn values(f: &Formula, w: &LassoWitness, succ: &[usize]) -> Vec<bool> {
    let n = succ.len();
    match f {
        Formula::True => vec![true; n],
        Formula::False => vec![false; n],
        Formula::Atom(a) => (0..n).map(|i| w.event_at(i).contains(a)).collect(),
        Formula::Not(a) => values(a, w, succ).into_iter().map(|v| !v).collect(),
        Formula::And(a, b) => zip(values(a, w, succ), values(b, w, succ), |x, y| x && y),
        Formula::Or(a, b) => zip(values(a, w, succ), values(b, w, succ), |x, y| x || y),
        Formula::Implies(a, b) => zip(values(a, w, succ), values(b, w, succ), |x, y| !x || y),
        Formula::Iff(a, b) => zip(values(a, w, succ), values(b, w, succ), |x, y| x == y),
        Formula::Next(a) => {
            let va = values(a, w, succ);
            succ.iter().map(|&s| va[s]).collect()
        }
        Formula::Globally(a) => {
            let va = values(a, w, succ);
            fixpoint(true, succ, |i, next| va[i] && next)
        }
        Formula::Eventually(a) => {
            let va = values(a, w, succ);
            fixpoint(false, succ, |i, next| va[i] || next)
        }
        Formula::Until(a, b) => {
            let (va, vb) = (values(a, w, succ), values(b, w, succ));
            fixpoint(false, succ, |i, next| vb[i] || (va[i] && next))
        }
        Formula::WeakUntil(a, b) => {
            let (va, vb) = (values(a, w, succ), values(b, w, succ));
            fixpoint(true, succ, |i, next| vb[i] || (va[i] && next))
        }
        Formula::Release(a, b) => {
            let (va, vb) = (values(a, w, succ), values(b, w, succ));
            fixpoint(true, succ, |i, next| vb[i] && (va[i] || next))
        }
    }
}

fn zip(a: Vec<bool>, b: Vec<bool>, op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.into_iter().zip(b).map(|(x, y)| op(x, y)).collect()
}

/// Iterates `v[i] = step(i, v[succ[i]])` from the constant `init` until
/// stable. The step is monotone, so this reaches the least (`init = false`)
/// or greatest (`init = true`) fixpoint.
fn fixpoint(init: bool, succ: &[usize], step: impl Fn(usize, bool) -> bool) -> Vec<bool> {
    let mut v = vec![init; succ.len()];
    loop {
        let mut changed = false;
        for i in (0..succ.len()).rev() {
            let x = step(i, v[succ[i]]);
            if x != v[i] {
                v[i] = x;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

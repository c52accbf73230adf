use super::{Keyword, PartialFormula};
use crate::ltl::{AtomName, Formula, Kind};

/// Renders `f` in the keyword language.
///
/// Every binary operator is wrapped in `( … )`. A left operand that starts
/// with `always,`, `eventually,` or `in the next state,` (possibly under
/// `not`) is also wrapped, because those prefixes extend as far right as
/// possible when read back.
///
/// ```
/// use ltlbridge::itl::serialize;
/// use ltlbridge::ltl::parse_infix;
///
/// let f = parse_infix("G (p -> F q)").unwrap();
/// assert_eq!(serialize(&f), "always, (if p, then eventually, q)");
/// ```
pub fn serialize(f: &Formula) -> String {
    full(f).0
}

/// (text, open-ended)
fn full(f: &Formula) -> (String, bool) {
    let kids: Vec<(String, bool)> = f.children().into_iter().map(full).collect();
    let atom = match f {
        Formula::Atom(a) => Some(a.as_str()),
        _ => None,
    };
    layout(f.kind(), atom, &kids)
}

pub(crate) fn serialize_partial(p: &PartialFormula, hole: &str) -> String {
    partial(p, hole).0
}

fn partial(p: &PartialFormula, hole: &str) -> (String, bool) {
    match p {
        PartialFormula::Complete(f) => full(f),
        PartialFormula::Hole => (hole.to_string(), false),
        PartialFormula::Node { kind, children } => {
            let kids: Vec<(String, bool)> = children.iter().map(|c| partial(c, hole)).collect();
            layout(*kind, None, &kids)
        }
    }
}

fn layout(kind: Kind, atom: Option<&str>, kids: &[(String, bool)]) -> (String, bool) {
    let left = |i: usize| -> String {
        let (text, open) = &kids[i];
        if *open {
            format!("({text})")
        } else {
            text.clone()
        }
    };
    let infix = |kw: Keyword| (format!("({}{}{})", left(0), kw.surface(), kids[1].0), false);
    let prefix = |kw: Keyword| (format!("{}{}", kw.surface(), kids[0].0), true);
    match kind {
        Kind::True => (Keyword::True.surface().to_string(), false),
        Kind::False => (Keyword::False.surface().to_string(), false),
        Kind::Atom => (atom.unwrap_or_default().to_string(), false),
        Kind::Not => (format!("{}{}", Keyword::Not.surface(), kids[0].0), kids[0].1),
        Kind::Next => prefix(Keyword::Next),
        Kind::Globally => prefix(Keyword::Always),
        Kind::Eventually => prefix(Keyword::Eventually),
        Kind::And => infix(Keyword::And),
        Kind::Or => infix(Keyword::Or),
        Kind::Iff => infix(Keyword::Iff),
        Kind::Until => infix(Keyword::Until),
        Kind::Release => infix(Keyword::Releases),
        Kind::WeakUntil => infix(Keyword::WeaklyUntil),
        Kind::Implies => (
            format!("({}{}{}{})", Keyword::If.surface(), kids[0].0, Keyword::Then.surface(), kids[1].0),
            false,
        ),
    }
}

/// Binding strength of infix levels; higher binds tighter.
fn level(kind: Kind) -> u8 {
    match kind {
        Kind::Iff => 1,
        Kind::Or => 2,
        Kind::And => 3,
        Kind::Until | Kind::Release | Kind::WeakUntil => 4,
        Kind::Not => 5,
        _ => 6,
    }
}

/// Renders `f` with only the parentheses the parser needs, substituting atoms
/// through `atom_text`. A parenthesized conditional starts with
/// `conditional_group` right after its `(`.
pub(crate) fn render_minimal_with(
    f: &Formula,
    atom_text: &dyn Fn(&AtomName) -> String,
    conditional_group: &str,
) -> String {
    Minimal { atom_text, conditional_group }.render(f).text
}

/// Renders `f` with only the parentheses needed to parse back to the same
/// tree under the documented precedence.
///
/// ```
/// use ltlbridge::itl::{parse, render_minimal};
/// use ltlbridge::ltl::parse_infix;
///
/// let f = parse_infix("(p & q) | r").unwrap();
/// assert_eq!(render_minimal(&f), "p and q or r");
/// assert_eq!(parse(&render_minimal(&f)).unwrap(), f);
/// ```
pub fn render_minimal(f: &Formula) -> String {
    render_minimal_with(f, &|a| a.as_str().to_string(), "")
}

struct Rendered {
    text: String,
    /// the rendering ends in a prefix form whose scope runs to the right edge
    open_end: bool,
    /// binding level of the outermost construct
    level: u8,
    conditional: bool,
}

struct Minimal<'a> {
    atom_text: &'a dyn Fn(&AtomName) -> String,
    conditional_group: &'a str,
}

impl Minimal<'_> {
    fn render(&self, f: &Formula) -> Rendered {
        let wrap = |r: Rendered| {
            let group = if r.conditional { self.conditional_group } else { "" };
            Rendered { text: format!("({group}{})", r.text), open_end: false, level: 6, conditional: false }
        };
        match f {
            Formula::True | Formula::False => {
                let kw = if matches!(f, Formula::True) { Keyword::True } else { Keyword::False };
                Rendered { text: kw.surface().to_string(), open_end: false, level: 6, conditional: false }
            }
            Formula::Atom(a) => Rendered { text: (self.atom_text)(a), open_end: false, level: 6, conditional: false },
            Formula::Not(a) => {
                let inner = self.render(a);
                let inner = if inner.level < 5 { wrap(inner) } else { inner };
                Rendered {
                    text: format!("{}{}", Keyword::Not.surface(), inner.text),
                    open_end: inner.open_end,
                    level: 5,
                    conditional: false,
                }
            }
            Formula::Next(a) | Formula::Globally(a) | Formula::Eventually(a) => {
                let kw = match f {
                    Formula::Next(_) => Keyword::Next,
                    Formula::Globally(_) => Keyword::Always,
                    _ => Keyword::Eventually,
                };
                let inner = self.render(a);
                Rendered { text: format!("{}{}", kw.surface(), inner.text), open_end: true, level: 6, conditional: false }
            }
            Formula::Implies(a, b) => {
                let ante = self.render(a);
                // a conditional inside an antecedent keeps explicit grouping
                let ante = if matches!(**a, Formula::Implies(..)) { wrap(ante) } else { ante };
                let cons = self.render(b);
                Rendered {
                    text: format!("{}{}{}{}", Keyword::If.surface(), ante.text, Keyword::Then.surface(), cons.text),
                    open_end: true,
                    level: 6,
                    conditional: true,
                }
            }
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Iff(a, b)
            | Formula::Until(a, b)
            | Formula::Release(a, b)
            | Formula::WeakUntil(a, b) => {
                let kw = match f.kind() {
                    Kind::And => Keyword::And,
                    Kind::Or => Keyword::Or,
                    Kind::Iff => Keyword::Iff,
                    Kind::Until => Keyword::Until,
                    Kind::Release => Keyword::Releases,
                    _ => Keyword::WeaklyUntil,
                };
                let own = level(f.kind());
                let lhs = self.render(a);
                let lhs = if lhs.open_end || lhs.level < own { wrap(lhs) } else { lhs };
                let rhs = self.render(b);
                let rhs = if rhs.level <= own { wrap(rhs) } else { rhs };
                Rendered {
                    text: format!("{}{}{}", lhs.text, kw.surface(), rhs.text),
                    open_end: rhs.open_end,
                    level: own,
                    conditional: false,
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::parse_infix;

    fn ser(s: &str) -> String {
        serialize(&parse_infix(s).unwrap())
    }

    #[test]
    fn keyword_table_examples() {
        assert_eq!(ser("1"), "true");
        assert_eq!(ser("0"), "false");
        assert_eq!(ser("p U q"), "(p until q)");
        assert_eq!(ser("G (p -> F q)"), "always, (if p, then eventually, q)");
        assert_eq!(ser("!p"), "not p");
        assert_eq!(ser("X p <-> q R r"), "((in the next state, p) if and only if (q releases r))");
        assert_eq!(ser("p W q | q"), "((p weakly until q) or q)");
    }

    #[test]
    fn open_left_operands_are_wrapped() {
        assert_eq!(ser("G p & q"), "((always, p) and q)");
        assert_eq!(ser("!F p & q"), "((not eventually, p) and q)");
        assert_eq!(ser("q & G p"), "(q and always, p)");
    }

    #[test]
    fn minimal_rendering() {
        let m = |s: &str| render_minimal(&parse_infix(s).unwrap());
        assert_eq!(m("G (p -> F q)"), "always, if p, then eventually, q");
        assert_eq!(m("p & (q | r)"), "p and (q or r)");
        assert_eq!(m("(p & q) & r"), "p and q and r");
        assert_eq!(m("p & (q & r)"), "p and (q and r)");
        assert_eq!(m("(G p) & q"), "(always, p) and q");
        assert_eq!(m("!(p U q)"), "not (p until q)");
        assert_eq!(m("(p -> q) -> r"), "if (if p, then q), then r");
    }
}

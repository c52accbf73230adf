use super::Formula;

/// Rewrites `f` over the core `{⊤, p, ¬, ∧, X, G, F, U}`.
///
/// `∨`, `→`, `↔`, `⊥`, `R` and `W` are replaced by their standard
/// definitions; no other simplification is performed.
pub fn expand_derived(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => Formula::not(True),
        Atom(a) => Atom(a.clone()),
        Not(a) => Formula::not(expand_derived(a)),
        And(a, b) => Formula::and(expand_derived(a), expand_derived(b)),
        Or(a, b) => core_or(expand_derived(a), expand_derived(b)),
        Implies(a, b) => core_or(Formula::not(expand_derived(a)), expand_derived(b)),
        Iff(a, b) => {
            let (a, b) = (expand_derived(a), expand_derived(b));
            Formula::and(
                core_or(Formula::not(a.clone()), b.clone()),
                core_or(Formula::not(b), a),
            )
        }
        Next(a) => Formula::next(expand_derived(a)),
        Globally(a) => Formula::globally(expand_derived(a)),
        Eventually(a) => Formula::eventually(expand_derived(a)),
        Until(a, b) => Formula::until(expand_derived(a), expand_derived(b)),
        Release(a, b) => Formula::not(Formula::until(
            Formula::not(expand_derived(a)),
            Formula::not(expand_derived(b)),
        )),
        WeakUntil(a, b) => {
            let (a, b) = (expand_derived(a), expand_derived(b));
            core_or(Formula::until(a.clone(), b), Formula::globally(a))
        }
    }
}

fn core_or(a: Formula, b: Formula) -> Formula {
    Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
}

/// Negation normal form over `{⊤, ⊥, p, ¬p, ∧, ∨, X, U, R}`.
///
/// `G φ` becomes `⊥ R φ`, `F φ` becomes `⊤ U φ`, and `a W b` becomes
/// `b R (a ∨ b)`.
pub fn to_nnf(f: &Formula) -> Formula {
    positive(f)
}

fn positive(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => True,
        False => False,
        Atom(a) => Atom(a.clone()),
        Not(a) => negative(a),
        And(a, b) => Formula::and(positive(a), positive(b)),
        Or(a, b) => Formula::or(positive(a), positive(b)),
        Implies(a, b) => Formula::or(negative(a), positive(b)),
        Iff(a, b) => Formula::and(
            Formula::or(negative(a), positive(b)),
            Formula::or(positive(a), negative(b)),
        ),
        Next(a) => Formula::next(positive(a)),
        Globally(a) => Formula::release(False, positive(a)),
        Eventually(a) => Formula::until(True, positive(a)),
        Until(a, b) => Formula::until(positive(a), positive(b)),
        Release(a, b) => Formula::release(positive(a), positive(b)),
        WeakUntil(a, b) => {
            let pb = positive(b);
            Formula::release(pb.clone(), Formula::or(positive(a), pb))
        }
    }
}

/// NNF of `¬f`.
fn negative(f: &Formula) -> Formula {
    use Formula::*;
    match f {
        True => False,
        False => True,
        Atom(a) => Formula::not(Atom(a.clone())),
        Not(a) => positive(a),
        And(a, b) => Formula::or(negative(a), negative(b)),
        Or(a, b) => Formula::and(negative(a), negative(b)),
        Implies(a, b) => Formula::and(positive(a), negative(b)),
        Iff(a, b) => Formula::or(
            Formula::and(positive(a), negative(b)),
            Formula::and(negative(a), positive(b)),
        ),
        Next(a) => Formula::next(negative(a)),
        Globally(a) => Formula::until(True, negative(a)),
        Eventually(a) => Formula::release(False, negative(a)),
        Until(a, b) => Formula::release(negative(a), negative(b)),
        Release(a, b) => Formula::until(negative(a), negative(b)),
        // ¬(a W b) ≡ ¬b U (¬a ∧ ¬b)
        WeakUntil(a, b) => {
            let nb = negative(b);
            Formula::until(nb.clone(), Formula::and(negative(a), nb))
        }
    }
}

/// True when `f` uses only the NNF operator set.
pub fn is_nnf(f: &Formula) -> bool {
    use Formula::*;
    match f {
        True | False | Atom(_) => true,
        Not(a) => matches!(**a, Atom(_)),
        And(a, b) | Or(a, b) | Until(a, b) | Release(a, b) => is_nnf(a) && is_nnf(b),
        Next(a) => is_nnf(a),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::{parse_infix, Kind};

    fn f(s: &str) -> Formula {
        parse_infix(s).unwrap()
    }

    fn only_kinds(f: &Formula, allowed: &[Kind]) -> bool {
        allowed.contains(&f.kind()) && f.children().iter().all(|c| only_kinds(c, allowed))
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(expand_derived(&f("p")), f("p"));
        assert_eq!(expand_derived(&f("a R b")), f("!(!a U !b)"));
        assert_eq!(expand_derived(&f("a W b")), f("!(!(a U b) & !G a)"));
    }

    #[test]
    fn expansion_uses_core_only() {
        let core = [
            Kind::True,
            Kind::Atom,
            Kind::Not,
            Kind::And,
            Kind::Next,
            Kind::Globally,
            Kind::Eventually,
            Kind::Until,
        ];
        let g = f("(a <-> b) | (0 -> (a W X b)) | (a R F b)");
        assert!(only_kinds(&expand_derived(&g), &core));
    }

    #[test]
    fn nnf_examples() {
        assert_eq!(to_nnf(&f("!(p U q)")), f("!p R !q"));
        assert_eq!(to_nnf(&f("!!p")), f("p"));
        assert_eq!(to_nnf(&f("!G p")), f("1 U !p"));
        assert_eq!(to_nnf(&f("G p")), f("0 R p"));
    }

    #[test]
    fn nnf_is_idempotent_on_mixed_input() {
        let g = f("!((a <-> X b) W !(F a -> G !b))");
        let once = to_nnf(&g);
        assert!(is_nnf(&once));
        assert_eq!(to_nnf(&once), once);
    }
}

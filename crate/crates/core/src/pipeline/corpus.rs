use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::itl;
use crate::ltl::{random_formula, AtomName, Stratum};
use crate::verify::Checker;

use super::{explain, DatasetRecord, DomainContext};

/// Stratum mix of 100 records: 31% simple, 42% medium, 19% high, 8% very high.
pub const DEFAULT_COUNTS: [usize; 4] = [31, 42, 19, 8];
/// Deepest formula drawn for the open-ended very-high stratum.
pub const VERY_HIGH_MAX_DEPTH: usize = 16;
/// Tableau cap used when screening generated formulas.
pub const SCREEN_MAX_EDGES: usize = 20_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorpusError {
    #[error("atom pool is empty")]
    EmptyPool,
    #[error("atom `{0}` has no definition in the context")]
    Ungrounded(AtomName),
    #[error("no verified formula found for stratum {0} after {1} draws")]
    Exhausted(Stratum, usize),
}

const MAX_DRAWS: usize = 10_000;

fn depth_bounds(s: Stratum) -> (usize, usize) {
    let (lo, hi) = s.depth_range();
    (lo, hi.min(VERY_HIGH_MAX_DEPTH))
}

/// Synthetic records, `counts[i]` from stratum `Stratum::ALL[i]`.
///
/// Depths are uniform within each stratum (13–16 for very high). A draw is
/// kept only if it verifies (satisfiable and not valid) within
/// [`SCREEN_MAX_EDGES`] and its text is new; otherwise the next draw is
/// tried. The requirement text is [`explain`] of the formula. The output
/// depends only on the arguments.
pub fn generate_corpus(
    seed: u64,
    counts: [usize; 4],
    atom_pool: &[AtomName],
    context: &DomainContext,
) -> Result<Vec<DatasetRecord>, CorpusError> {
    if atom_pool.is_empty() {
        return Err(CorpusError::EmptyPool);
    }
    if let Some(a) = atom_pool.iter().find(|a| context.describe(a).is_none()) {
        return Err(CorpusError::Ungrounded(a.clone()));
    }
    let checker = Checker::bounded(SCREEN_MAX_EDGES);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(counts.iter().sum());
    for (stratum, &count) in Stratum::ALL.iter().zip(&counts) {
        let (lo, hi) = depth_bounds(*stratum);
        for i in 0..count {
            let mut draws = 0;
            let f = loop {
                if draws == MAX_DRAWS {
                    return Err(CorpusError::Exhausted(*stratum, MAX_DRAWS));
                }
                draws += 1;
                let f = random_formula(rng.gen(), rng.gen_range(lo..=hi), atom_pool).expect("pool and depth checked");
                let text = itl::serialize(&f);
                if !seen.contains(&text) && checker.is_nontrivial(&f).is_ok_and(|v| v.is_verified()) {
                    seen.insert(text);
                    break f;
                }
            };
            out.push(DatasetRecord {
                id: format!("{}-{i:04}", stratum.name()),
                requirement: explain(&f, context).expect("grounded"),
                context: context.clone(),
                itl: itl::serialize(&f),
                ltl: f.to_string(),
                depth: f.depth(),
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn ctx() -> (Vec<AtomName>, DomainContext) {
        let atoms: Vec<AtomName> = ["p", "q", "r"].iter().map(|a| AtomName::new(*a).unwrap()).collect();
        let defs = atoms.iter().map(|a| (a.clone(), format!("signal {a} is high"))).collect::<BTreeMap<_, _>>();
        (atoms, DomainContext::new("test", defs).unwrap())
    }

    #[test]
    fn strata_and_determinism() {
        let (atoms, c) = ctx();
        let a = generate_corpus(3, [3, 2, 1, 1], &atoms, &c).unwrap();
        assert_eq!(a, generate_corpus(3, [3, 2, 1, 1], &atoms, &c).unwrap());
        let strata: Vec<Stratum> = a.iter().map(|r| Stratum::of_depth(r.depth)).collect();
        use Stratum::*;
        assert_eq!(strata, vec![Simple, Simple, Simple, Medium, Medium, High, VeryHigh]);
        for r in &a {
            r.validate().unwrap();
        }
    }

    #[test]
    fn pool_must_be_grounded() {
        let (_, c) = ctx();
        let z = vec![AtomName::new("z").unwrap()];
        assert!(matches!(generate_corpus(0, [1, 0, 0, 0], &z, &c), Err(CorpusError::Ungrounded(_))));
        assert_eq!(generate_corpus(0, [1, 0, 0, 0], &[], &c), Err(CorpusError::EmptyPool));
    }
}

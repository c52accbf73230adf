use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{AtomName, Formula};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RandomFormulaError {
    #[error("atom pool is empty")]
    EmptyAtomPool,
    #[error("target depth must be at least 1")]
    ZeroDepth,
}

/// Draws a formula of exactly `target_depth` over `atom_pool`.
///
/// Deterministic in `seed`. Internal nodes are chosen with weights unary
/// temporal 0.3, binary temporal 0.2, boolean binary 0.3, negation 0.1; a
/// leaf is forced once one level of depth remains. For binary nodes one
/// child (picked at random) carries the full remaining depth and the other is
/// drawn from the shallower half, which keeps deep formulas narrow enough to
/// verify.
pub fn random_formula(seed: u64, target_depth: usize, atom_pool: &[AtomName]) -> Result<Formula, RandomFormulaError> {
    if atom_pool.is_empty() {
        return Err(RandomFormulaError::EmptyAtomPool);
    }
    if target_depth == 0 {
        return Err(RandomFormulaError::ZeroDepth);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample(&mut rng, target_depth, atom_pool))
}

pub(crate) fn sample<R: Rng>(rng: &mut R, depth: usize, pool: &[AtomName]) -> Formula {
    if depth == 1 {
        return leaf(rng, pool);
    }
    // weights scaled by 10: unary temporal 3, binary temporal 2, boolean 3, negation 1
    let roll = rng.gen_range(0..9);
    match roll {
        0..=2 => {
            let child = sample(rng, depth - 1, pool);
            match rng.gen_range(0..3) {
                0 => Formula::next(child),
                1 => Formula::globally(child),
                _ => Formula::eventually(child),
            }
        }
        3..=4 => {
            let (a, b) = binary_children(rng, depth, pool);
            match rng.gen_range(0..3) {
                0 => Formula::until(a, b),
                1 => Formula::release(a, b),
                _ => Formula::weak_until(a, b),
            }
        }
        5..=7 => {
            let (a, b) = binary_children(rng, depth, pool);
            match rng.gen_range(0..4) {
                0 => Formula::and(a, b),
                1 => Formula::or(a, b),
                2 => Formula::implies(a, b),
                _ => Formula::iff(a, b),
            }
        }
        _ => Formula::not(sample(rng, depth - 1, pool)),
    }
}

fn binary_children<R: Rng>(rng: &mut R, depth: usize, pool: &[AtomName]) -> (Formula, Formula) {
    let full = depth - 1;
    let shallow_max = full.div_ceil(2).max(1);
    let shallow = rng.gen_range(1..=shallow_max);
    let deep_left = rng.gen_bool(0.5);
    let first = sample(rng, if deep_left { full } else { shallow }, pool);
    let second = sample(rng, if deep_left { shallow } else { full }, pool);
    (first, second)
}

fn leaf<R: Rng>(rng: &mut R, pool: &[AtomName]) -> Formula {
    match rng.gen_range(0..10) {
        0 => Formula::True,
        1 => Formula::False,
        _ => Formula::Atom(pool[rng.gen_range(0..pool.len())].clone()),
    }
}

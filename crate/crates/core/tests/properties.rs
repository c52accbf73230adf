mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{atoms, corrupt, oracle};
use ltlbridge::automata::{accepts_lasso, degeneralize, evaluate_on_lasso, is_empty, ltl_to_gba};
use ltlbridge::itl::{self, lex, Keyword, TokenKind};
use ltlbridge::ltl::{expand_derived, random_formula, stats, to_nnf, Formula, Kind};
use ltlbridge::pipeline::{self, classify_mismatch, DomainContext, EvalConfig};
use ltlbridge::policy::{self, advantages, AdvantageNorm, GrammarPolicy, RewardConfig, TrainConfig, TrainingTask};
use ltlbridge::repair::{self, RepairStatus};
use ltlbridge::verify::{self, VerdictKind};

fn formula(seed: u64, depth: usize, n_atoms: usize) -> Formula {
    let pool = atoms(&["p", "q", "r", "s"][..n_atoms]);
    random_formula(seed, depth, &pool).unwrap()
}

fn nnf(seed: u64, depth: usize) -> Formula {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    oracle::random_nnf(&mut rng, &atoms(&["p", "q", "r"]), depth)
}

fn count(f: &Formula, kind: Kind) -> usize {
    f.paths().iter().filter(|p| f.subterm(p).unwrap().kind() == kind).count()
}

fn context(names: &[&str]) -> DomainContext {
    let defs: BTreeMap<_, _> = atoms(names).into_iter().map(|a| (a.clone(), format!("signal {a} is high"))).collect();
    DomainContext::new("synthetic", defs).unwrap()
}

// ltl -----------------------------------------------------------------------

#[test]
fn normal_forms_preserve_semantics() {
    for seed in 0..1000 {
        let f = formula(seed, 1 + (seed % 6) as usize, 3);
        assert!(verify::are_equivalent(&f, &to_nnf(&f)), "to_nnf changed {f}");
        assert!(verify::are_equivalent(&f, &expand_derived(&f)), "expand_derived changed {f}");
    }
}

proptest! {
    #[test]
    fn nnf_is_idempotent(seed in any::<u64>(), depth in 1usize..=8) {
        let once = to_nnf(&formula(seed, depth, 4));
        prop_assert_eq!(to_nnf(&once), once);
    }

    #[test]
    fn depth_grows_toward_the_root(seed in any::<u64>(), depth in 1usize..=10) {
        let f = formula(seed, depth, 4);
        for p in f.paths() {
            let node = f.subterm(&p).unwrap();
            for c in node.children() {
                prop_assert!(stats(node).ast_depth > stats(c).ast_depth);
            }
        }
    }
}

// itl -----------------------------------------------------------------------

proptest! {
    #[test]
    fn serialize_then_parse_is_identity(seed in any::<u64>(), depth in 1usize..=12) {
        let f = formula(seed, depth, 4);
        prop_assert_eq!(itl::parse(&itl::serialize(&f)).unwrap(), f);
    }

    #[test]
    fn parse_is_total(src in "[a-z(), ]{0,40}|((always|eventually|if|then|and|or|not|until|weakly|releases|in the next state|p|q|\\(|\\)|,) ?){0,12}") {
        if let Err(e) = itl::parse(&src) {
            prop_assert!(e.position <= src.len());
            prop_assert!(!e.expected.is_empty());
        }
    }

    #[test]
    fn token_spans_cover_the_source(src in "((weakly until|if and only if|if|, then|always,|not|p|q_1|\\(|\\)) {0,2}){0,12}") {
        if let Ok(tokens) = lex(&src) {
            let mut at = 0;
            for t in &tokens {
                prop_assert!(t.span.start >= at && t.span.end > t.span.start);
                prop_assert!(src[at..t.span.start].trim().is_empty());
                at = t.span.end;
            }
            prop_assert!(src[at..].trim().is_empty());
        }
    }

    #[test]
    fn multiword_keywords_lex_greedily(seed in any::<u64>(), depth in 1usize..=8) {
        let f = formula(seed, depth, 4);
        let tokens = lex(&itl::serialize(&f)).unwrap();
        let kw = |k: Keyword| tokens.iter().filter(|t| t.kind == TokenKind::Keyword(k)).count();
        prop_assert_eq!(kw(Keyword::WeaklyUntil), count(&f, Kind::WeakUntil));
        prop_assert_eq!(kw(Keyword::Until), count(&f, Kind::Until));
        prop_assert_eq!(kw(Keyword::Iff), count(&f, Kind::Iff));
        prop_assert_eq!(kw(Keyword::If), count(&f, Kind::Implies));
    }
}

// automata ------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn degeneralization_preserves_emptiness(seed in any::<u64>(), depth in 1usize..=6) {
        let f = nnf(seed, depth);
        let a = ltl_to_gba(&f).unwrap();
        let d = degeneralize(&a);
        prop_assert_eq!(d.acceptance_sets.len(), 1);
        prop_assert!(d.num_states <= a.num_states * (a.acceptance_sets.len() + 1));
        let (ra, rd) = (is_empty(&a), is_empty(&d));
        prop_assert_eq!(ra.empty, rd.empty);
        for w in [ra.witness, rd.witness].into_iter().flatten() {
            prop_assert!(evaluate_on_lasso(&f, &w));
            prop_assert!(accepts_lasso(&a, &w));
        }
    }
}

// verify --------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn equivalence_is_symmetric_and_transitive(seed in any::<u64>(), picks in prop::array::uniform3(0usize..6)) {
        let base = formula(seed, 3, 2);
        let other = formula(seed ^ 1, 3, 2);
        let pool = [to_nnf(&base), expand_derived(&base), base, to_nnf(&other), expand_derived(&other), other];
        let [a, b, c] = picks.map(|i| &pool[i]);
        let (ab, bc, ac) = (verify::are_equivalent(a, b), verify::are_equivalent(b, c), verify::are_equivalent(a, c));
        prop_assert_eq!(ab, verify::are_equivalent(b, a));
        prop_assert!(!(ab && bc) || ac);
        prop_assert!(verify::are_equivalent(a, a));
    }

    #[test]
    fn verified_verdicts_carry_sound_witnesses(seed in any::<u64>(), depth in 1usize..=6) {
        let f = formula(seed, depth, 3);
        let v = verify::classify(&itl::serialize(&f));
        if v.kind == VerdictKind::Verified {
            let (w, cw) = (v.witness.unwrap(), v.counter_witness.unwrap());
            prop_assert!(evaluate_on_lasso(&f, &w) && oracle::holds_on(&f, &w));
            prop_assert!(!evaluate_on_lasso(&f, &cw) && !oracle::holds_on(&f, &cw));
        }
    }
}

// repair --------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn repair_cost_accounting(seed in any::<u64>(), depth in 2usize..=7, n in 1usize..=2, budget in 1usize..=6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let broken = corrupt::corrupt(&itl::serialize(&formula(seed, depth, 4)), n, &mut rng);
        let out = repair::repair(&broken, budget);
        if out.status == RepairStatus::Failed {
            prop_assert_eq!(out.repair_cost, budget);
        } else {
            prop_assert_eq!(out.repair_cost, out.edits.len());
            prop_assert!(out.repair_cost <= budget);
        }
        if out.status == RepairStatus::RepairedVerified {
            let again = repair::repair(&out.result.unwrap().source, budget);
            prop_assert_eq!(again.repair_cost, 0);
            prop_assert!(again.edits.is_empty());
        }
    }

    #[test]
    fn heuristic_layer_stops_at_first_parse(seed in any::<u64>(), depth in 2usize..=7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let broken = corrupt::corrupt(&itl::serialize(&formula(seed, depth, 4)), 1, &mut rng);
        let Some(err) = itl::ItlDocument::new(broken.as_str()).error().cloned() else { return Ok(()) };
        let out = repair::heuristic_repair(&broken, &repair::Failure::Parse(err), 5);
        if out.parses() {
            // no shorter prefix of the edit chain already parsed
            for e in &out.edits[..out.edits.len() - 1] {
                prop_assert!(itl::parse(&e.after).is_err(), "stopped late at {}", e.after);
            }
        }
    }
}

// policy --------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn reward_is_bounded_and_linear_in_cost(seed in any::<u64>(), n in 0usize..=2, gamma in 0.0f64..0.5) {
        let cfg = RewardConfig { gamma, ..RewardConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let candidate = corrupt::corrupt(&itl::serialize(&formula(seed, 4, 3)), n, &mut rng);
        let r = policy::compute_reward(&candidate, &cfg);
        prop_assert!(r.value >= -cfg.gamma * cfg.budget_m as f64 - 1e-12);
        prop_assert!(r.value <= cfg.alpha + cfg.beta + 1e-12);
        // R + gamma*cost depends on the outcome alone, so at a fixed outcome
        // more cost never means more reward
        let cost = r.repair.as_ref().map_or(0, |o| o.repair_cost) as f64;
        let base = r.value + cfg.gamma * cost;
        prop_assert!([0.0, cfg.alpha, cfg.alpha + cfg.beta].iter().any(|b| (base - b).abs() < 1e-9), "base {}", base);
    }

    #[test]
    fn unnormalized_advantages_are_centered(rewards in prop::collection::vec(-3.0f64..3.0, 2..16)) {
        let sum: f64 = advantages(&rewards, AdvantageNorm::Unnormalized).iter().sum();
        prop_assert!(sum.abs() < 1e-9);
    }
}

fn tasks() -> Vec<TrainingTask> {
    let ctx = context(&["p", "q", "r", "s"]);
    ctx.atoms().map(|a| TrainingTask::new(format!("{a} holds"), ctx.clone(), [a.clone()].into()).unwrap()).collect()
}

#[test]
fn zero_learning_rate_is_a_fixed_point() {
    let start = GrammarPolicy::uniform(4);
    let cfg = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
    for step in 0..10 {
        let (next, report) = policy::grpo_step(&start, &tasks(), &cfg, &RewardConfig::default(), step).unwrap();
        assert_eq!(next.weights, start.weights);
        assert!(report.advantage_sums.iter().all(|s| s.abs() < 1e-9));
    }
}

#[test]
fn mean_reward_moving_average_improves() {
    let mut means = Vec::new();
    policy::train(&GrammarPolicy::uniform(4), &tasks(), &TrainConfig::default(), &RewardConfig::default(), |s| {
        means.push(s.mean_reward)
    })
    .unwrap();
    assert_eq!(means.len(), 500);
    let ma = |end: usize| means[end - 50..end].iter().sum::<f64>() / 50.0;
    assert!(ma(500) > ma(50), "{} vs {}", ma(500), ma(50));
}

// pipeline ------------------------------------------------------------------

#[test]
fn evaluation_ignores_candidate_order() {
    let ctx = context(&["p", "q", "r"]);
    let refs = pipeline::generate_corpus(5, [8, 6, 4, 2], &atoms(&["p", "q", "r"]), &ctx).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cands: Vec<(String, String)> = refs
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let text = if i % 3 == 0 { corrupt::corrupt(&r.itl, 1, &mut rng) } else { r.itl.clone() };
            (r.id.clone(), text)
        })
        .collect();
    let cfg = EvalConfig::default();
    let first = pipeline::evaluate(&refs, &cands, &cfg).unwrap();
    for _ in 0..3 {
        cands.shuffle(&mut rng);
        assert_eq!(pipeline::evaluate(&refs, &cands, &cfg).unwrap(), first);
    }
}

#[test]
fn mismatch_classes_are_total_and_deterministic() {
    let mut pairs = 0;
    for seed in 0..200 {
        let (a, b) = (formula(seed, 3, 3), formula(seed + 10_000, 3, 3));
        if verify::are_equivalent(&a, &b) {
            continue;
        }
        pairs += 1;
        let c = classify_mismatch(&a, &b).unwrap();
        assert_eq!(classify_mismatch(&a, &b).unwrap(), c);
    }
    assert!(pairs > 100);
}

#[test]
fn explanations_are_injective_on_a_corpus() {
    let names = ["p", "q", "r", "s"];
    let ctx = context(&names);
    let corpus = pipeline::generate_corpus(11, pipeline::DEFAULT_COUNTS, &atoms(&names), &ctx).unwrap();
    let mut seen: BTreeMap<String, &str> = BTreeMap::new();
    for r in &corpus {
        let sentence = pipeline::explain(&r.formula().unwrap(), &ctx).unwrap();
        if let Some(other) = seen.insert(sentence.clone(), &r.itl) {
            assert_eq!(other, r.itl, "`{sentence}` explains two formulas");
        }
    }
}

//! Verifier-rewarded training of a weighted-grammar generator.
//!
//! [`compute_reward`] scores a candidate string as
//! `R = alpha * parses + beta * verified - gamma * repair_cost`, measured after
//! repair. [`GrammarPolicy`] is a log-linear distribution over derivations
//! of the keyword-language grammar: at every node it picks one of the 14
//! productions with probability `softmax(w[parent] / T)`, where `parent` is
//! the production of the parent node (or the root). [`grpo_step`] samples a
//! group of candidates per task, centers their rewards on the group mean and
//! moves the weights along the exact gradient of the derivation
//! log-likelihood weighted by those advantages.
//!
//! [`generator`] lets an external process or TCP service stand in for the
//! grammar policy.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::itl;
use crate::ltl::{AtomName, Formula, Kind};
use crate::pipeline::DomainContext;
use crate::repair::{self, RepairConfig, RepairOutcome, RepairStatus};
use crate::verify::{self, Verdict};

pub mod generator;

pub use generator::{external_generate, ChildGenerator, GeneratorEndpoint, GeneratorError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolicyError {
    #[error("task has no target atoms")]
    NoAtoms,
    #[error("target atom `{0}` has no definition in the task context")]
    UndefinedAtom(AtomName),
    #[error("group size must be at least 2, got {0}")]
    GroupTooSmall(usize),
    #[error("temperature must be positive and finite")]
    BadTemperature,
    #[error("max depth must be at least 1")]
    ZeroDepth,
}

// ---------------------------------------------------------------------------
// reward

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub budget_m: usize,
    /// Score the repaired string (default). When false the raw candidate is
    /// scored and no repair runs.
    pub use_repair: bool,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig { alpha: 1.0, beta: 1.0, gamma: 0.1, budget_m: repair::DEFAULT_BUDGET, use_repair: true }
    }
}

impl RewardConfig {
    /// Reward of a candidate that could not be obtained at all, e.g. after a
    /// generator failure: the same as an unrepairable string.
    pub fn failure_reward(&self) -> f64 {
        -self.gamma * self.budget_m as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Reward {
    pub value: f64,
    /// Verdict on the raw candidate.
    pub verdict: Verdict,
    /// `None` when the candidate was already verified or repair is disabled.
    pub repair: Option<RepairOutcome>,
}

/// `R = alpha * [parses] + beta * [verified] - gamma * repair_cost`.
///
/// Both indicators refer to the string after repair. A failed repair leaves
/// the candidate unchanged, so a parseable but trivial candidate still earns
/// `alpha` while paying the full budget.
pub fn compute_reward(candidate: &str, cfg: &RewardConfig) -> Reward {
    let verdict = verify::classify(candidate);
    let (parses, verified, cost, repair) = if verdict.is_verified() {
        (true, true, 0, None)
    } else if !cfg.use_repair {
        (verdict.parses(), false, 0, None)
    } else {
        let rc = RepairConfig { budget: cfg.budget_m, ..RepairConfig::default() };
        let out = repair::repair_classified(candidate, verdict.clone(), &rc);
        let parses = match out.status {
            RepairStatus::Failed => verdict.parses(),
            _ => out.parses(),
        };
        (parses, out.status == RepairStatus::RepairedVerified, out.repair_cost, Some(out))
    };
    let value = cfg.alpha * f64::from(u8::from(parses)) + cfg.beta * f64::from(u8::from(verified)) - cfg.gamma * cost as f64;
    Reward { value, verdict, repair }
}

// ---------------------------------------------------------------------------
// tasks and policy

/// One input of the generator: requirement text, domain and the atoms a
/// candidate may use.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainingTask {
    pub prompt: String,
    pub domain: String,
    pub context: DomainContext,
    pub target_atoms: BTreeSet<AtomName>,
}

impl TrainingTask {
    pub fn new(
        prompt: impl Into<String>,
        context: DomainContext,
        target_atoms: BTreeSet<AtomName>,
    ) -> Result<Self, PolicyError> {
        if target_atoms.is_empty() {
            return Err(PolicyError::NoAtoms);
        }
        if let Some(a) = target_atoms.iter().find(|a| context.describe(a).is_none()) {
            return Err(PolicyError::UndefinedAtom(a.clone()));
        }
        Ok(TrainingTask { prompt: prompt.into(), domain: context.domain_label().to_string(), context, target_atoms })
    }

    /// A task over every atom of `context`.
    pub fn from_context(prompt: impl Into<String>, context: DomainContext) -> Self {
        let atoms = context.atoms().cloned().collect();
        Self::new(prompt, context, atoms).expect("contexts are nonempty")
    }
}

pub const NUM_PRODUCTIONS: usize = Kind::ALL.len();
/// Root plus one context per parent production.
pub const NUM_CONTEXTS: usize = NUM_PRODUCTIONS + 1;

/// Log-linear grammar policy. `weights[c][k]` scores production `Kind::ALL[k]`
/// under context `c` (0 for the root, `1 + parent.index()` otherwise).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrammarPolicy {
    pub weights: Vec<[f64; NUM_PRODUCTIONS]>,
    pub temperature: f64,
    pub max_depth: usize,
}

/// One choice in a derivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Step {
    pub context: usize,
    pub production: Kind,
    /// Only leaf productions were applicable (depth cap reached).
    pub leaf_only: bool,
}

fn context_index(parent: Option<Kind>) -> usize {
    parent.map_or(0, |k| 1 + k.index())
}

impl GrammarPolicy {
    pub fn uniform(max_depth: usize) -> Self {
        GrammarPolicy { weights: vec![[0.0; NUM_PRODUCTIONS]; NUM_CONTEXTS], temperature: 1.0, max_depth }
    }

    pub fn validate(&self) -> Result<(), PolicyError> {
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(PolicyError::BadTemperature);
        }
        if self.max_depth == 0 {
            return Err(PolicyError::ZeroDepth);
        }
        Ok(())
    }

    /// Production probabilities in `context`; inapplicable productions get 0.
    pub fn probabilities(&self, context: usize, leaf_only: bool) -> [f64; NUM_PRODUCTIONS] {
        let w = &self.weights[context];
        let applicable = |k: Kind| !leaf_only || k.arity() == 0;
        let max = Kind::ALL.iter().filter(|k| applicable(**k)).map(|k| w[k.index()]).fold(f64::NEG_INFINITY, f64::max);
        let mut p = [0.0; NUM_PRODUCTIONS];
        for k in Kind::ALL {
            if applicable(k) {
                p[k.index()] = ((w[k.index()] - max) / self.temperature).exp();
            }
        }
        let z: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= z);
        p
    }

    fn derive<R: Rng>(
        &self,
        rng: &mut R,
        parent: Option<Kind>,
        remaining: usize,
        atoms: &[AtomName],
        steps: &mut Vec<Step>,
    ) -> Formula {
        let context = context_index(parent);
        let leaf_only = remaining <= 1;
        let p = self.probabilities(context, leaf_only);
        let mut roll: f64 = rng.gen();
        let mut kind = *Kind::ALL.iter().rev().find(|k| p[k.index()] > 0.0).expect("some production applies");
        for k in Kind::ALL {
            if roll < p[k.index()] {
                kind = k;
                break;
            }
            roll -= p[k.index()];
        }
        steps.push(Step { context, production: kind, leaf_only });
        let atom = (kind == Kind::Atom).then(|| atoms.choose(rng).expect("atoms nonempty").clone());
        let children = (0..kind.arity()).map(|_| self.derive(rng, Some(kind), remaining - 1, atoms, steps)).collect();
        Formula::from_kind(kind, atom, children).expect("arity matches")
    }

    /// Samples a formula and the derivation that produced it.
    pub fn sample_derivation(&self, task: &TrainingTask, seed: u64) -> Result<(Formula, Vec<Step>), PolicyError> {
        self.validate()?;
        if task.target_atoms.is_empty() {
            return Err(PolicyError::NoAtoms);
        }
        let atoms: Vec<AtomName> = task.target_atoms.iter().cloned().collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut steps = Vec::new();
        let f = self.derive(&mut rng, None, self.max_depth, &atoms, &mut steps);
        Ok((f, steps))
    }

    /// Gradient of the log-likelihood of `steps` with respect to the weights.
    fn add_log_likelihood_gradient(&self, steps: &[Step], scale: f64, grad: &mut [[f64; NUM_PRODUCTIONS]]) {
        for s in steps {
            let p = self.probabilities(s.context, s.leaf_only);
            for k in 0..NUM_PRODUCTIONS {
                let chosen = if k == s.production.index() { 1.0 } else { 0.0 };
                grad[s.context][k] += scale * (chosen - p[k]) / self.temperature;
            }
        }
    }
}

/// Serialized candidate for `task`, deterministic in `(policy, task, seed)`.
pub fn sample_candidate(policy: &GrammarPolicy, task: &TrainingTask, seed: u64) -> Result<String, PolicyError> {
    Ok(itl::serialize(&policy.sample_derivation(task, seed)?.0))
}

// ---------------------------------------------------------------------------
// GRPO

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Baseline {
    #[default]
    GroupMean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdvantageNorm {
    /// `(R - mean) / (std + 1e-8)`.
    #[default]
    StdNormalized,
    /// `R - mean`.
    Unnormalized,
}

pub const ADVANTAGE_EPSILON: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub group_size: usize,
    pub learning_rate: f64,
    pub steps: usize,
    pub seed: u64,
    pub baseline: Baseline,
    pub advantage_norm: AdvantageNorm,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            group_size: 8,
            learning_rate: 0.05,
            steps: 500,
            seed: 0,
            baseline: Baseline::GroupMean,
            advantage_norm: AdvantageNorm::StdNormalized,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepReport {
    pub step: u64,
    pub mean_reward: f64,
    /// Fraction of sampled candidates verified without repair.
    pub pass_rate: f64,
    /// Per task, the sum of `R - mean` over its group.
    pub advantage_sums: Vec<f64>,
}

/// Group-relative advantages of `rewards`.
pub fn advantages(rewards: &[f64], norm: AdvantageNorm) -> Vec<f64> {
    let n = rewards.len() as f64;
    let mean = rewards.iter().sum::<f64>() / n;
    let centered: Vec<f64> = rewards.iter().map(|r| r - mean).collect();
    match norm {
        AdvantageNorm::Unnormalized => centered,
        AdvantageNorm::StdNormalized => {
            let std = (centered.iter().map(|a| a * a).sum::<f64>() / n).sqrt();
            centered.iter().map(|a| a / (std + ADVANTAGE_EPSILON)).collect()
        }
    }
}

fn sample_seeds(cfg: &TrainConfig, step: u64, count: usize) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(step);
    (0..count).map(|_| rng.gen()).collect()
}

/// One update: `group_size` candidates per task, rewards, advantages, and
/// `w += lr * sum_i A_i * grad log pi(derivation_i)`.
///
/// Sampling seeds depend only on `(cfg.seed, step)`. A group whose rewards
/// are all equal has zero advantages and leaves the weights unchanged.
pub fn grpo_step(
    policy: &GrammarPolicy,
    tasks: &[TrainingTask],
    cfg: &TrainConfig,
    rcfg: &RewardConfig,
    step: u64,
) -> Result<(GrammarPolicy, StepReport), PolicyError> {
    if cfg.group_size < 2 {
        return Err(PolicyError::GroupTooSmall(cfg.group_size));
    }
    let seeds = sample_seeds(cfg, step, tasks.len() * cfg.group_size);
    let mut grad = vec![[0.0; NUM_PRODUCTIONS]; NUM_CONTEXTS];
    let (mut reward_sum, mut passed) = (0.0, 0usize);
    let mut advantage_sums = Vec::with_capacity(tasks.len());
    for (t, task) in tasks.iter().enumerate() {
        let mut rewards = Vec::with_capacity(cfg.group_size);
        let mut derivations = Vec::with_capacity(cfg.group_size);
        for i in 0..cfg.group_size {
            let (f, steps) = policy.sample_derivation(task, seeds[t * cfg.group_size + i])?;
            let r = compute_reward(&itl::serialize(&f), rcfg);
            passed += usize::from(r.verdict.is_verified());
            reward_sum += r.value;
            rewards.push(r.value);
            derivations.push(steps);
        }
        advantage_sums.push(advantages(&rewards, AdvantageNorm::Unnormalized).iter().sum());
        for (a, steps) in advantages(&rewards, cfg.advantage_norm).iter().zip(&derivations) {
            if *a != 0.0 {
                policy.add_log_likelihood_gradient(steps, *a, &mut grad);
            }
        }
    }
    let mut next = policy.clone();
    for (w, g) in next.weights.iter_mut().zip(&grad) {
        for (wk, gk) in w.iter_mut().zip(g) {
            *wk += cfg.learning_rate * gk;
        }
    }
    let n = (tasks.len() * cfg.group_size).max(1) as f64;
    let report = StepReport { step, mean_reward: reward_sum / n, pass_rate: passed as f64 / n, advantage_sums };
    Ok((next, report))
}

/// Fraction of `samples_per_task` candidates per task that verify, drawn
/// with seeds derived from `seed` only.
pub fn pass_rate(
    policy: &GrammarPolicy,
    tasks: &[TrainingTask],
    samples_per_task: usize,
    seed: u64,
) -> Result<f64, PolicyError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut ok, mut total) = (0usize, 0usize);
    for task in tasks {
        for _ in 0..samples_per_task {
            let c = sample_candidate(policy, task, rng.gen())?;
            ok += usize::from(verify::classify(&c).is_verified());
            total += 1;
        }
    }
    Ok(if total == 0 { 0.0 } else { ok as f64 / total as f64 })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainReport {
    pub initial_pass_rate: f64,
    pub final_pass_rate: f64,
    pub steps: Vec<StepReport>,
    pub policy: GrammarPolicy,
}

/// Samples per task used to measure pass rates before and after training.
pub const EVAL_SAMPLES: usize = 100;

/// Runs `cfg.steps` GRPO steps from `policy`, measuring the pass rate on a
/// fixed evaluation sample before and after. `on_step` sees every report.
pub fn train(
    policy: &GrammarPolicy,
    tasks: &[TrainingTask],
    cfg: &TrainConfig,
    rcfg: &RewardConfig,
    mut on_step: impl FnMut(&StepReport),
) -> Result<TrainReport, PolicyError> {
    let eval_seed = cfg.seed ^ 0x5eed_e7a1;
    let initial_pass_rate = pass_rate(policy, tasks, EVAL_SAMPLES, eval_seed)?;
    let mut current = policy.clone();
    let mut steps = Vec::with_capacity(cfg.steps);
    for step in 0..cfg.steps as u64 {
        let (next, report) = grpo_step(&current, tasks, cfg, rcfg, step)?;
        on_step(&report);
        steps.push(report);
        current = next;
    }
    let final_pass_rate = pass_rate(&current, tasks, EVAL_SAMPLES, eval_seed)?;
    Ok(TrainReport { initial_pass_rate, final_pass_rate, steps, policy: current })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn task(atoms: &[&str]) -> TrainingTask {
        let defs: BTreeMap<AtomName, String> =
            atoms.iter().map(|a| (AtomName::new(*a).unwrap(), format!("{a} holds"))).collect();
        TrainingTask::from_context("req", DomainContext::new("test", defs).unwrap())
    }

    #[test]
    fn reward_examples() {
        let cfg = RewardConfig::default();
        assert_eq!(compute_reward("eventually, p", &cfg).value, 2.0);
        assert_eq!(compute_reward(")) ,, ((", &cfg).value, -0.5);
        assert_eq!(compute_reward("eventual, p", &cfg).value, 1.9);
        // parses, trivial, unrepairable
        assert_eq!(compute_reward("true", &cfg).value, 0.5);
        let raw = RewardConfig { use_repair: false, ..cfg };
        assert_eq!(compute_reward("eventual, p", &raw).value, 0.0);
    }

    #[test]
    fn depth_one_samples() {
        let pol = GrammarPolicy::uniform(1);
        let t = task(&["p"]);
        for seed in 0..50 {
            let c = sample_candidate(&pol, &t, seed).unwrap();
            assert!(["true", "false", "p"].contains(&c.as_str()), "{c}");
            assert_eq!(c, sample_candidate(&pol, &t, seed).unwrap());
        }
    }

    #[test]
    fn samples_parse() {
        let pol = GrammarPolicy::uniform(5);
        let t = task(&["p", "q"]);
        for seed in 0..1000 {
            let c = sample_candidate(&pol, &t, seed).unwrap();
            assert!(itl::parse(&c).is_ok(), "{c}");
        }
    }

    #[test]
    fn probabilities_are_distributions() {
        let mut pol = GrammarPolicy::uniform(3);
        pol.weights[0][3] = 2.5;
        pol.weights[4][0] = -1.0;
        for c in 0..NUM_CONTEXTS {
            for leaf in [false, true] {
                let p = pol.probabilities(c, leaf);
                assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
                if leaf {
                    assert_eq!(p.iter().filter(|x| **x > 0.0).count(), 3);
                }
            }
        }
    }

    #[test]
    fn centering_and_fixed_points() {
        let a = advantages(&[1.0, 2.0, -0.5, 0.3], AdvantageNorm::Unnormalized);
        assert!(a.iter().sum::<f64>().abs() < 1e-12);
        assert!(advantages(&[0.7; 5], AdvantageNorm::StdNormalized).iter().all(|x| *x == 0.0));

        let pol = GrammarPolicy::uniform(3);
        let tasks = [task(&["p", "q"])];
        let cfg = TrainConfig { learning_rate: 0.0, ..TrainConfig::default() };
        let (next, report) = grpo_step(&pol, &tasks, &cfg, &RewardConfig::default(), 0).unwrap();
        assert_eq!(next, pol);
        assert!(report.advantage_sums.iter().all(|s| s.abs() < 1e-9));
        let bad = TrainConfig { group_size: 1, ..cfg };
        assert_eq!(grpo_step(&pol, &tasks, &bad, &RewardConfig::default(), 0), Err(PolicyError::GroupTooSmall(1)));
    }

    #[test]
    fn task_validation() {
        let t = task(&["p"]);
        let extra = BTreeSet::from([AtomName::new("z").unwrap()]);
        assert!(matches!(TrainingTask::new("r", t.context.clone(), extra), Err(PolicyError::UndefinedAtom(_))));
        assert_eq!(TrainingTask::new("r", t.context, BTreeSet::new()), Err(PolicyError::NoAtoms));
    }
}

//! Command-line front end. Structured output goes to stdout as JSON (or
//! JSON lines for record streams); errors go to stderr as a JSON object
//! and the process exits with status 1. Usage errors exit with status 2.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use ltlbridge::itl::{self, ItlDocument};
use ltlbridge::ltl::{parse_infix, AtomName, Formula};
use ltlbridge::pipeline::{self, Candidate, DomainContext, EvalConfig, IngestMode};
use ltlbridge::policy::{self, GrammarPolicy, RewardConfig, TrainConfig, TrainingTask};
use ltlbridge::repair::{self, RepairConfig};
use ltlbridge::verify;

/// Environment variable holding the default repair budget.
const BUDGET_ENV: &str = "LTLBRIDGE_BUDGET";

#[derive(Parser)]
#[command(name = "ltlbridge", version, about = "Keyword-language LTL toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a keyword-language candidate.
    Verify(Input),
    /// Classify a candidate and repair it if it fails.
    Repair {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        budget: Budget,
    },
    /// Render a formula as an English sentence.
    Explain {
        /// Formula in the keyword language or infix notation.
        formula: String,
        /// Context JSON: {"domain": ..., "definitions": {atom: description}}.
        #[arg(long)]
        context: PathBuf,
    },
    /// Write a synthetic corpus as JSON lines.
    GenCorpus {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Records per stratum: simple,medium,high,very_high.
        #[arg(long, value_parser = parse_counts, default_value = "31,42,19,8")]
        counts: [usize; 4],
        /// Context JSON; defaults to atoms p, q, r, s.
        #[arg(long)]
        context: Option<PathBuf>,
    },
    /// Score candidates against reference records.
    Eval {
        #[arg(long)]
        refs: PathBuf,
        #[arg(long)]
        cands: PathBuf,
        /// Measure before repair.
        #[arg(long)]
        no_repair: bool,
        /// Tableau size cap per check; 0 removes the cap.
        #[arg(long, default_value_t = pipeline::DEFAULT_EVAL_MAX_EDGES)]
        max_edges: usize,
        #[command(flatten)]
        budget: Budget,
    },
    /// Train the grammar policy with verification rewards.
    Train(TrainArgs),
    /// Classify and repair each candidate of a JSON-lines file.
    Filter {
        #[arg(long = "in")]
        input: PathBuf,
        #[command(flatten)]
        budget: Budget,
    },
}

#[derive(Args)]
struct Input {
    /// Candidate text.
    #[arg(required_unless_present = "file", conflicts_with = "file")]
    text: Option<String>,
    /// Read the candidate from a file (`-` for stdin).
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args)]
struct Budget {
    /// Repair budget m.
    #[arg(long, env = BUDGET_ENV, default_value_t = repair::DEFAULT_BUDGET)]
    budget: usize,
}

#[derive(Args)]
struct TrainArgs {
    #[arg(long, default_value_t = 500)]
    steps: usize,
    #[arg(long, default_value_t = 8)]
    group: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 4)]
    max_depth: usize,
    /// Reward raw candidates without repair.
    #[arg(long)]
    no_repair: bool,
    /// Context JSON; one task per atom. Defaults to atoms p, q, r, s.
    #[arg(long)]
    context: Option<PathBuf>,
    #[command(flatten)]
    budget: Budget,
}

fn parse_counts(s: &str) -> Result<[usize; 4], String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 4 {
        return Err("expected four comma-separated counts".into());
    }
    let mut out = [0; 4];
    for (o, p) in out.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|e| format!("`{p}`: {e}"))?;
    }
    Ok(out)
}

fn read_input(input: &Input) -> Result<String> {
    match (&input.text, &input.file) {
        (Some(t), _) => Ok(t.clone()),
        (None, Some(p)) if p == Path::new("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s)?;
            Ok(s.trim_end_matches(['\r', '\n']).to_string())
        }
        (None, Some(p)) => {
            let s = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(s.trim_end_matches(['\r', '\n']).to_string())
        }
        (None, None) => bail!("no candidate given"),
    }
}

fn load_context(path: &Path) -> Result<DomainContext> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&s).with_context(|| format!("parsing context {}", path.display()))
}

fn default_context() -> DomainContext {
    let defs: BTreeMap<AtomName, String> = ["p", "q", "r", "s"]
        .iter()
        .map(|a| (AtomName::new(*a).expect("valid atom"), format!("signal {a} is high")))
        .collect();
    DomainContext::new("synthetic", defs).expect("non-empty context")
}

fn context_or_default(path: &Option<PathBuf>) -> Result<DomainContext> {
    path.as_deref().map_or_else(|| Ok(default_context()), load_context)
}

fn parse_formula(text: &str) -> Result<Formula> {
    let doc = ItlDocument::new(text);
    if let Some(f) = doc.formula() {
        return Ok(f.clone());
    }
    let itl_err = doc.error().map(|e| e.to_string()).unwrap_or_default();
    parse_infix(text).map_err(|e| anyhow::anyhow!("not a keyword-language formula ({itl_err}) nor infix ({e})"))
}

fn read_candidates(path: &Path) -> Result<Vec<(String, String)>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let c: Candidate =
            serde_json::from_str(&line).with_context(|| format!("{}: line {}", path.display(), i + 1))?;
        out.push((c.id, c.candidate));
    }
    Ok(out)
}

fn print_json(v: &impl serde::Serialize) -> Result<()> {
    let mut out = io::stdout().lock();
    serde_json::to_writer(&mut out, v)?;
    writeln!(out)?;
    Ok(())
}

fn print_lines<T: serde::Serialize>(items: &[T]) -> Result<()> {
    let mut out = io::stdout().lock();
    for it in items {
        serde_json::to_writer(&mut out, it)?;
        writeln!(out)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Verify(input) => {
            let text = read_input(&input)?;
            print_json(&verify::classify(&text))
        }
        Command::Repair { input, budget } => {
            let text = read_input(&input)?;
            let cfg = RepairConfig { budget: budget.budget, ..RepairConfig::default() };
            let verdict = verify::classify(&text);
            let outcome = repair::repair_classified(&text, verdict.clone(), &cfg);
            print_json(&json!({ "verdict": verdict, "repair": outcome }))
        }
        Command::Explain { formula, context } => {
            let ctx = load_context(&context)?;
            let f = parse_formula(&formula)?;
            let sentence = pipeline::explain(&f, &ctx)?;
            print_json(&json!({ "itl": itl::serialize(&f), "explanation": sentence }))
        }
        Command::GenCorpus { seed, counts, context } => {
            let ctx = context_or_default(&context)?;
            let atoms: Vec<AtomName> = ctx.atoms().cloned().collect();
            let records = pipeline::generate_corpus(seed, counts, &atoms, &ctx)?;
            print_lines(&records)
        }
        Command::Eval { refs, cands, no_repair, max_edges, budget } => {
            let refs = pipeline::ingest(&refs, IngestMode::Strict)?.records;
            let cands = read_candidates(&cands)?;
            let cfg = EvalConfig {
                budget_m: budget.budget,
                repair: !no_repair,
                max_edges: (max_edges > 0).then_some(max_edges),
            };
            print_json(&pipeline::evaluate(&refs, &cands, &cfg)?)
        }
        Command::Train(a) => {
            let ctx = context_or_default(&a.context)?;
            let tasks = ctx
                .atoms()
                .map(|atom| {
                    let prompt = format!("{} holds at some point", ctx.describe(atom).unwrap_or(atom.as_str()));
                    TrainingTask::new(prompt, ctx.clone(), BTreeSet::from([atom.clone()]))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let cfg = TrainConfig {
                group_size: a.group,
                learning_rate: a.learning_rate,
                steps: a.steps,
                seed: a.seed,
                ..TrainConfig::default()
            };
            let rcfg = RewardConfig {
                alpha: a.alpha,
                beta: a.beta,
                gamma: a.gamma,
                budget_m: a.budget.budget,
                use_repair: !a.no_repair,
            };
            let report = policy::train(&GrammarPolicy::uniform(a.max_depth), &tasks, &cfg, &rcfg, |_| {})?;
            print_json(&report)
        }
        Command::Filter { input, budget } => {
            let cands = read_candidates(&input)?;
            print_lines(&pipeline::run_filter(&cands, budget.budget))
        }
    }
}

/// A closed downstream reader (`ltlbridge filter ... | head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|c| {
        let kind = c
            .downcast_ref::<io::Error>()
            .map(io::Error::kind)
            .or_else(|| c.downcast_ref::<serde_json::Error>().and_then(serde_json::Error::io_error_kind));
        kind == Some(io::ErrorKind::BrokenPipe)
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if is_broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", json!({ "error": format!("{e:#}") }));
            ExitCode::FAILURE
        }
    }
}

//! Minimal-edit repair of keyword-language strings.
//!
//! Two layers run in order. The heuristic layer tries single text edits in a
//! fixed rank order (parenthesis fixes at the error position, inserting
//! `and` between adjacent operands, keyword spelling normalization) and
//! accepts the first one that makes the string parse. The structural layer is
//! a best-first search over edit sequences that may also work on the syntax
//! tree: filling holes of the parser's partial tree, relabelling operators,
//! and deleting subtrees. It accepts the first candidate that parses and is
//! verified (satisfiable and not valid).
//!
//! Repairs that change a verified formula's operators change its meaning; a
//! repaired string is a proposal, not a correction.

use std::collections::HashSet;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::itl::{self, Expected, Found, ItlDocument, Keyword, ParseError, PartialFormula, Span, TokenKind};
use crate::ltl::{AtomName, Formula, Kind};
use crate::verify::{Checker, Verdict, VerdictKind};

/// Candidate edits the heuristic layer may try.
pub const DEFAULT_BUDGET: usize = 5;
/// Maximum number of edits in a structural repair.
pub const DEFAULT_STRUCTURAL_COST: usize = 4;
pub const DEFAULT_BEAM_WIDTH: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Paren {
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EditKind {
    InsertParen { paren: Paren, position: usize },
    DeleteParen { position: usize },
    InsertOperator { keyword: Keyword, position: usize },
    /// Replaces the text at `from_span` with `to_keyword`, a keyword or one
    /// word of a multiword keyword.
    NormalizeKeyword { from_span: Span, to_keyword: String },
    RelabelNode { path: Vec<usize>, new_kind: Kind },
    /// Removes the subtree at `path`; its binary parent is replaced by the
    /// sibling.
    DeleteSubtree { path: Vec<usize> },
    /// Fills the hole at `path` of a partial tree.
    InsertSubtree { path: Vec<usize>, template: Formula },
}

/// One applied edit, with the text before and after it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edit {
    #[serde(flatten)]
    pub kind: EditKind,
    pub cost: usize,
    pub before: String,
    pub after: String,
}

impl Edit {
    fn new(kind: EditKind, before: impl Into<String>, after: impl Into<String>) -> Self {
        Edit { kind, cost: 1, before: before.into(), after: after.into() }
    }
}

impl fmt::Display for Edit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}: {:?} -> {:?}", self.kind, self.before, self.after)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RepairStatus {
    RepairedVerified,
    RepairedParsedOnly,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RepairOutcome {
    pub status: RepairStatus,
    pub result: Option<ItlDocument>,
    pub edits: Vec<Edit>,
    /// Number of edits, or the budget when the repair failed.
    pub repair_cost: usize,
}

impl RepairOutcome {
    fn failed(budget: usize) -> Self {
        RepairOutcome { status: RepairStatus::Failed, result: None, edits: Vec::new(), repair_cost: budget }
    }

    fn success(status: RepairStatus, source: String, edits: Vec<Edit>) -> Self {
        let repair_cost = edits.len();
        RepairOutcome { status, result: Some(ItlDocument::new(source)), edits, repair_cost }
    }

    /// The repaired string parses.
    pub fn parses(&self) -> bool {
        self.result.as_ref().is_some_and(|d| d.formula().is_some())
    }
}

impl Serialize for RepairOutcome {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            status: RepairStatus,
            result: Option<&'a str>,
            edits: &'a [Edit],
            repair_cost: usize,
        }
        Wire {
            status: self.status,
            result: self.result.as_ref().map(|d| d.source.as_str()),
            edits: &self.edits,
            repair_cost: self.repair_cost,
        }
        .serialize(s)
    }
}

/// Why the input needs repair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Failure {
    Parse(ParseError),
    Verification(Verdict),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RepairConfig {
    /// Heuristic candidates tried, and the cap on edits across both layers.
    pub budget: usize,
    pub structural_cost: usize,
    pub beam_width: usize,
    /// Candidates the structural search may evaluate before giving up.
    pub max_candidates: usize,
    /// Tableau size cap for each verification; larger candidates count as
    /// not verified.
    pub max_edges: usize,
}

impl Default for RepairConfig {
    fn default() -> Self {
        RepairConfig {
            budget: DEFAULT_BUDGET,
            structural_cost: DEFAULT_STRUCTURAL_COST,
            beam_width: DEFAULT_BEAM_WIDTH,
            max_candidates: 600,
            max_edges: 20_000,
        }
    }
}

impl RepairConfig {
    fn checker(&self) -> Checker {
        Checker::bounded(self.max_edges)
    }
}

fn is_verified(checker: &Checker, f: &Formula) -> bool {
    checker.is_nontrivial(f).is_ok_and(|v| v.is_verified())
}

// ---------------------------------------------------------------------------
// raw text helpers

/// `[A-Za-z0-9_]+` runs of `src`.
fn words(src: &str) -> Vec<Span> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Span { start, end: i });
        } else {
            i += 1;
        }
    }
    out
}

/// Identifiers of `src` in order of first appearance.
fn identifiers(src: &str) -> Vec<AtomName> {
    let mut out: Vec<AtomName> = Vec::new();
    for w in words(src) {
        if let Ok(a) = AtomName::new(&src[w.start..w.end]) {
            if !out.contains(&a) {
                out.push(a);
            }
        }
    }
    out
}

/// Best keyword word for a misspelled `word`: smallest edit distance, then
/// keywords that extend `word`, then table order.
fn nearest_keyword_word(word: &str, max_distance: usize) -> Option<&'static str> {
    let lower = word.to_ascii_lowercase();
    itl::RESERVED_WORDS
        .iter()
        .enumerate()
        .filter(|(_, k)| **k != lower)
        .map(|(i, k)| (strsim::levenshtein(&lower, k), !k.starts_with(&lower), i, *k))
        .filter(|(d, ..)| *d <= max_distance)
        .min()
        .map(|(.., k)| k)
}

fn normalization_candidates(src: &str, at: usize) -> Vec<EditKind> {
    let ws = words(src);
    // index of the word nearest to the error
    let near = ws.iter().position(|w| w.end > at).unwrap_or(ws.len().saturating_sub(1));
    let mut order: Vec<usize> = (0..ws.len()).collect();
    order.sort_by_key(|&i| (ws[i].start.abs_diff(at), i));
    let mut out = Vec::new();
    for i in order {
        let w = &src[ws[i].start..ws[i].end];
        let reserved = itl::is_reserved_word(&w.to_ascii_lowercase());
        let target = if reserved {
            // a stray keyword word is only suspicious right at the error
            if i.abs_diff(near) > 1 {
                continue;
            }
            nearest_keyword_word(w, 1)
        } else {
            nearest_keyword_word(w, 2.min(w.len().saturating_sub(1)))
        };
        if let Some(t) = target {
            out.push(EditKind::NormalizeKeyword { from_span: ws[i], to_keyword: t.to_string() });
        }
    }
    out
}

/// Ranked single text edits for a parse failure.
fn text_candidates(src: &str, err: &ParseError) -> Vec<EditKind> {
    let at = err.position.min(src.len());
    let opens = src.matches('(').count();
    let closes = src.matches(')').count();
    let mut out = Vec::new();
    if opens > closes {
        out.push(EditKind::InsertParen { paren: Paren::Close, position: at });
    }
    if matches!(err.found, Found::Token(TokenKind::RParen)) && closes >= opens {
        out.push(EditKind::DeleteParen { position: at });
    }
    if matches!(err.found, Found::Token(TokenKind::LParen)) && opens > closes {
        out.push(EditKind::DeleteParen { position: at });
    }
    let operand_found = match &err.found {
        Found::Token(TokenKind::Ident(_) | TokenKind::LParen) => true,
        Found::Token(TokenKind::Keyword(k)) => !k.is_infix() && *k != Keyword::Then,
        _ => false,
    };
    if operand_found && err.expected.contains(&Expected::Keyword(Keyword::And)) {
        out.push(EditKind::InsertOperator { keyword: Keyword::And, position: at });
    }
    out.extend(normalization_candidates(src, at));
    out
}

/// Swaps of easily confused keywords, for strings that parse but fail
/// verification.
fn swap_candidates(src: &str) -> Vec<EditKind> {
    let Ok(tokens) = itl::lex(src) else {
        return Vec::new();
    };
    let mut out = Vec::new();
    for t in tokens {
        let TokenKind::Keyword(k) = t.kind else { continue };
        let alts: &[Keyword] = match k {
            Keyword::And => &[Keyword::Or],
            Keyword::Or => &[Keyword::And],
            Keyword::Until => &[Keyword::Releases, Keyword::WeaklyUntil],
            Keyword::Releases => &[Keyword::Until],
            Keyword::WeaklyUntil => &[Keyword::Until],
            Keyword::Always => &[Keyword::Eventually],
            Keyword::Eventually => &[Keyword::Always],
            Keyword::True => &[Keyword::False],
            Keyword::False => &[Keyword::True],
            _ => &[],
        };
        for alt in alts {
            out.push(EditKind::NormalizeKeyword { from_span: t.span, to_keyword: alt.text().to_string() });
        }
    }
    out
}

/// Applies a text edit, or `None` if it does not fit `src`.
fn apply_text(src: &str, kind: &EditKind) -> Option<String> {
    let mut s = src.to_string();
    match kind {
        EditKind::InsertParen { paren, position } => {
            let p = *position;
            src.is_char_boundary(p).then_some(())?;
            s.insert(p, if *paren == Paren::Open { '(' } else { ')' });
        }
        EditKind::DeleteParen { position } => {
            let c = *src.as_bytes().get(*position)?;
            (c == b'(' || c == b')').then_some(())?;
            s.remove(*position);
        }
        EditKind::InsertOperator { keyword, position } => {
            let p = *position;
            src.is_char_boundary(p).then_some(())?;
            let after_space = p == 0 || src[..p].ends_with(char::is_whitespace);
            let text = if after_space { format!("{} ", keyword.text()) } else { format!(" {} ", keyword.text()) };
            s.insert_str(p, &text);
        }
        EditKind::NormalizeKeyword { from_span, to_keyword } => {
            src.get(from_span.start..from_span.end)?;
            s.replace_range(from_span.start..from_span.end, to_keyword);
        }
        _ => return None,
    }
    Some(s)
}

/// Start offset of the text edit, used to tell progress from a shifted error.
fn edit_position(kind: &EditKind) -> usize {
    match kind {
        EditKind::InsertParen { position, .. }
        | EditKind::DeleteParen { position }
        | EditKind::InsertOperator { position, .. } => *position,
        EditKind::NormalizeKeyword { from_span, .. } => from_span.start,
        _ => 0,
    }
}

// ---------------------------------------------------------------------------
// heuristic layer

struct HeuristicRun {
    /// Parseable (and, for verification failures, verified) result.
    accepted: Option<String>,
    /// Text after the applied edits.
    current: String,
    edits: Vec<Edit>,
}

fn run_heuristics(source: &str, failure: &Failure, budget: usize, checker: &Checker) -> HeuristicRun {
    let mut attempts = 0;
    match failure {
        Failure::Verification(_) => {
            for kind in swap_candidates(source) {
                if attempts >= budget {
                    break;
                }
                attempts += 1;
                let Some(next) = apply_text(source, &kind) else { continue };
                if itl::parse(&next).is_ok_and(|f| is_verified(checker, &f)) {
                    let edit = Edit::new(kind, source, next.clone());
                    return HeuristicRun { accepted: Some(next), current: source.to_string(), edits: vec![edit] };
                }
            }
            HeuristicRun { accepted: None, current: source.to_string(), edits: Vec::new() }
        }
        Failure::Parse(err) => {
            let mut current = source.to_string();
            let mut err = err.clone();
            let mut edits = Vec::new();
            loop {
                let mut progress: Option<(EditKind, String, ParseError)> = None;
                for kind in text_candidates(&current, &err) {
                    if attempts >= budget {
                        return HeuristicRun { accepted: None, current, edits };
                    }
                    attempts += 1;
                    let Some(next) = apply_text(&current, &kind) else { continue };
                    match itl::parse(&next) {
                        Ok(_) => {
                            edits.push(Edit::new(kind, current, next.clone()));
                            return HeuristicRun { accepted: Some(next.clone()), current: next, edits };
                        }
                        Err(e2) => {
                            let shift = if edit_position(&kind) <= err.position {
                                next.len() as i64 - current.len() as i64
                            } else {
                                0
                            };
                            if progress.is_none() && e2.position as i64 > err.position as i64 + shift {
                                progress = Some((kind, next, e2));
                            }
                        }
                    }
                }
                // no single edit parses: keep the first that moved the error
                // forward and go again
                let Some((kind, next, e2)) = progress else {
                    return HeuristicRun { accepted: None, current, edits };
                };
                edits.push(Edit::new(kind, current, next.clone()));
                current = next;
                err = e2;
            }
        }
    }
}

/// Ranked single edits within a budget of `budget_m` candidates.
///
/// For a parse failure the first edit that makes the string parse is
/// accepted; when no candidate parses, the first one that moves the error
/// further right is kept and the next round starts from there. For a
/// verification failure, confusable keywords are swapped one at a time and
/// the first verified result is accepted.
pub fn heuristic_repair(source: &str, failure: &Failure, budget_m: usize) -> RepairOutcome {
    let checker = RepairConfig::default().checker();
    let run = run_heuristics(source, failure, budget_m, &checker);
    match run.accepted {
        Some(text) => {
            let verified = itl::parse(&text).is_ok_and(|f| is_verified(&checker, &f));
            let status = if verified { RepairStatus::RepairedVerified } else { RepairStatus::RepairedParsedOnly };
            RepairOutcome::success(status, text, run.edits)
        }
        None => RepairOutcome::failed(budget_m),
    }
}

// ---------------------------------------------------------------------------
// structural layer

#[derive(Debug, Clone)]
enum Node {
    Text { src: String, err: ParseError },
    Partial(PartialFormula),
    Ast(Formula),
}

impl Node {
    fn text(&self) -> String {
        match self {
            Node::Text { src, .. } => src.clone(),
            Node::Partial(p) => p.to_string(),
            Node::Ast(f) => itl::serialize(f),
        }
    }

    fn key(&self) -> String {
        match self {
            Node::Text { src, .. } => format!("t:{src}"),
            Node::Partial(p) => format!("p:{p}"),
            Node::Ast(f) => format!("a:{f}"),
        }
    }

    fn from_text(src: String) -> Node {
        match itl::parse(&src) {
            Ok(f) => Node::Ast(f),
            Err(err) => Node::Text { src, err },
        }
    }

    fn from_partial(p: PartialFormula) -> Node {
        match p.as_complete() {
            Some(f) => Node::Ast(f.clone()),
            None => Node::Partial(p),
        }
    }
}

fn dual(k: Kind) -> Option<Kind> {
    Some(match k {
        Kind::And => Kind::Or,
        Kind::Or => Kind::And,
        Kind::Until => Kind::Release,
        Kind::Release => Kind::Until,
        Kind::WeakUntil => Kind::Until,
        Kind::Globally => Kind::Eventually,
        Kind::Eventually => Kind::Globally,
        Kind::True => Kind::False,
        Kind::False => Kind::True,
        _ => return None,
    })
}

const BINARY: [Kind; 7] = [Kind::And, Kind::Or, Kind::Implies, Kind::Iff, Kind::Until, Kind::Release, Kind::WeakUntil];
const UNARY: [Kind; 4] = [Kind::Not, Kind::Next, Kind::Globally, Kind::Eventually];

fn relabel(f: &Formula, path: &[usize], kind: Kind) -> Option<Formula> {
    let node = f.subterm(path)?;
    let children = node.children().into_iter().cloned().collect();
    let new = Formula::from_kind(kind, None, children)?;
    f.replace_at(path, new)
}

fn delete_subtree(f: &Formula, path: &[usize]) -> Option<Formula> {
    let (last, parent) = path.split_last()?;
    let p = f.subterm(parent)?;
    if p.kind().arity() != 2 {
        return None;
    }
    let sibling = p.children()[1 - last].clone();
    f.replace_at(parent, sibling)
}

/// Children of an AST node in rank order: dual relabels, subtree deletions
/// (right operand before left), then the remaining relabels.
fn ast_children(f: &Formula) -> Vec<(EditKind, Node)> {
    let paths = f.paths();
    let mut out = Vec::new();
    for p in &paths {
        if let Some(k) = dual(f.subterm(p).expect("path").kind()) {
            if let Some(g) = relabel(f, p, k) {
                out.push((EditKind::RelabelNode { path: p.clone(), new_kind: k }, Node::Ast(g)));
            }
        }
    }
    for p in &paths {
        if f.subterm(p).expect("path").kind().arity() == 2 {
            for side in [1, 0] {
                let mut q = p.clone();
                q.push(side);
                if let Some(g) = delete_subtree(f, &q) {
                    out.push((EditKind::DeleteSubtree { path: q }, Node::Ast(g)));
                }
            }
        }
    }
    for p in &paths {
        let k = f.subterm(p).expect("path").kind();
        let pool: &[Kind] = match k.arity() {
            2 => &BINARY,
            1 => &UNARY,
            _ => &[],
        };
        for &alt in pool {
            if alt != k && Some(alt) != dual(k) {
                if let Some(g) = relabel(f, p, alt) {
                    out.push((EditKind::RelabelNode { path: p.clone(), new_kind: alt }, Node::Ast(g)));
                }
            }
        }
    }
    out
}

/// A prefix of a keyword word or one edit away from one, like `eventual`.
fn looks_like_keyword(a: &AtomName) -> bool {
    let w = a.as_str().to_ascii_lowercase();
    w.len() >= 3
        && itl::RESERVED_WORDS
            .iter()
            .any(|k| (k.len() > w.len() && k.starts_with(&w)) || strsim::levenshtein(&w, k) <= 1)
}

/// Hole fillings for the leftmost hole: identifiers the partial tree does
/// not use yet, then used ones, then likely misspelled keywords.
fn fill_children(p: &PartialFormula, ids: &[AtomName]) -> Vec<(EditKind, Node)> {
    let Some(path) = p.holes().into_iter().next() else {
        return Vec::new();
    };
    let used = p.atoms();
    let mut ranked: Vec<&AtomName> = ids.iter().collect();
    ranked.sort_by_key(|a| if looks_like_keyword(a) { 2 } else if used.contains(*a) { 1 } else { 0 });
    ranked
        .into_iter()
        .filter_map(|a| {
            let template = Formula::Atom(a.clone());
            let filled = p.fill(&path, template.clone())?;
            Some((EditKind::InsertSubtree { path: path.clone(), template }, Node::from_partial(filled)))
        })
        .collect()
}

fn children(node: &Node, ids: &[AtomName]) -> Vec<(EditKind, Node)> {
    match node {
        Node::Text { src, err } => {
            let mut out = match &err.partial_ast {
                Some(p) if !p.holes().is_empty() => fill_children(p, ids),
                _ => Vec::new(),
            };
            for kind in text_candidates(src, err) {
                if let Some(next) = apply_text(src, &kind) {
                    out.push((kind, Node::from_text(next)));
                }
            }
            out
        }
        Node::Partial(p) => fill_children(p, ids),
        Node::Ast(f) => ast_children(f),
    }
}

struct SearchResult {
    verified: Option<(String, Vec<Edit>)>,
    /// First parseable candidate met, when the start did not parse.
    parsed: Option<(String, Vec<Edit>)>,
}

fn search(start: Node, ids: &[AtomName], max_cost: usize, cfg: &RepairConfig) -> SearchResult {
    let checker = cfg.checker();
    let mut seen: HashSet<String> = HashSet::from([start.key()]);
    let mut level = vec![(start, Vec::<Edit>::new())];
    let mut parsed = None;
    let mut evaluated = 0;
    for _ in 0..max_cost {
        let mut next_level = Vec::new();
        for (node, edits) in &level {
            let before = node.text();
            for (kind, child) in children(node, ids) {
                if !seen.insert(child.key()) {
                    continue;
                }
                if evaluated >= cfg.max_candidates {
                    return SearchResult { verified: None, parsed };
                }
                evaluated += 1;
                let mut trail = edits.clone();
                trail.push(Edit::new(kind, before.clone(), child.text()));
                if let Node::Ast(f) = &child {
                    if is_verified(&checker, f) {
                        return SearchResult { verified: Some((child.text(), trail)), parsed };
                    }
                    if parsed.is_none() {
                        parsed = Some((child.text(), trail.clone()));
                    }
                }
                next_level.push((child, trail));
            }
        }
        next_level.truncate(cfg.beam_width);
        if next_level.is_empty() {
            break;
        }
        level = next_level;
    }
    SearchResult { verified: None, parsed }
}

fn start_node(doc: &ItlDocument) -> Node {
    match &doc.parse {
        Ok(f) => Node::Ast(f.clone()),
        Err(err) => Node::Text { src: doc.source.clone(), err: err.clone() },
    }
}

/// Breadth-first (equivalently, cost-ordered) search over edit sequences of
/// at most `budget_m` edits, keeping `beam_width` candidates per cost level.
///
/// Unparsed text is edited with the heuristic edits and by filling holes of
/// the parser's partial tree with identifiers from the source; parsed
/// formulas are edited by relabelling nodes and deleting subtrees. The first
/// verified candidate is accepted. If none is found but some candidate
/// parsed, the first such candidate is returned as `RepairedParsedOnly`.
pub fn structural_repair(doc: &ItlDocument, budget_m: usize, beam_width: usize) -> RepairOutcome {
    let cfg = RepairConfig { beam_width, ..RepairConfig::default() };
    let ids = identifiers(&doc.source);
    let r = search(start_node(doc), &ids, budget_m, &cfg);
    if let Some((text, edits)) = r.verified {
        return RepairOutcome::success(RepairStatus::RepairedVerified, text, edits);
    }
    if doc.formula().is_none() {
        if let Some((text, edits)) = r.parsed {
            return RepairOutcome::success(RepairStatus::RepairedParsedOnly, text, edits);
        }
    }
    RepairOutcome::failed(budget_m)
}

/// [`repair_with`] using the default configuration and budget `budget_m`.
pub fn repair(source: &str, budget_m: usize) -> RepairOutcome {
    repair_with(source, &RepairConfig { budget: budget_m, ..RepairConfig::default() })
}

/// Classifies `source`; verified input is returned unchanged at cost 0.
/// Otherwise the heuristic layer runs, then the structural layer with the
/// edits left over (at most `structural_cost`), so a repair never applies
/// more than `budget` edits in total.
///
/// Input too large to verify within `max_edges` is returned as parsed-only at
/// cost 0.
pub fn repair_with(source: &str, cfg: &RepairConfig) -> RepairOutcome {
    match cfg.checker().classify(source) {
        Ok(verdict) => repair_classified(source, verdict, cfg),
        Err(_) => RepairOutcome::success(RepairStatus::RepairedParsedOnly, source.to_string(), Vec::new()),
    }
}

/// [`repair_with`] for a string already classified as `verdict`.
pub fn repair_classified(source: &str, verdict: Verdict, cfg: &RepairConfig) -> RepairOutcome {
    let checker = cfg.checker();
    let failure = match verdict.kind {
        VerdictKind::Verified => {
            return RepairOutcome::success(RepairStatus::RepairedVerified, source.to_string(), Vec::new())
        }
        VerdictKind::ParseFailure { ref error } => Failure::Parse(error.clone()),
        _ => Failure::Verification(verdict),
    };
    let ids = identifiers(source);
    let run = run_heuristics(source, &failure, cfg.budget, &checker);
    let left = cfg.structural_cost.min(cfg.budget.saturating_sub(run.edits.len()));

    let (start, mut edits, fallback) = match run.accepted {
        Some(text) => {
            let f = itl::parse(&text).expect("accepted text parses");
            if is_verified(&checker, &f) {
                return RepairOutcome::success(RepairStatus::RepairedVerified, text, run.edits);
            }
            match failure {
                // a verification failure only accepts verified results
                Failure::Verification(_) => unreachable!("accepted swap is verified"),
                Failure::Parse(_) => (Node::Ast(f), run.edits.clone(), Some((text, run.edits))),
            }
        }
        None => (Node::from_text(run.current.clone()), run.edits, None),
    };
    let r = search(start, &ids, left, cfg);
    if let Some((text, more)) = r.verified {
        edits.extend(more);
        return RepairOutcome::success(RepairStatus::RepairedVerified, text, edits);
    }
    if matches!(failure, Failure::Parse(_)) {
        let parsed = fallback.or_else(|| {
            r.parsed.map(|(text, more)| {
                let mut all = edits.clone();
                all.extend(more);
                (text, all)
            })
        });
        if let Some((text, all)) = parsed {
            return RepairOutcome::success(RepairStatus::RepairedParsedOnly, text, all);
        }
    }
    RepairOutcome::failed(cfg.budget)
}

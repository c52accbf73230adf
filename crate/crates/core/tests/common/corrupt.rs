//! Seeded corruptions of serialized formulas.

use ltlbridge::itl::is_reserved_word;
use rand::seq::SliceRandom;
use rand::Rng;

const INFIX: [&str; 6] = [" if and only if ", " weakly until ", " releases ", " until ", " and ", " or "];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Corruption {
    /// Remove one `(` or `)`.
    ParenDeletion,
    /// Drop 1 or 2 trailing characters of one keyword word of length >= 3,
    /// keeping at least 2 characters.
    KeywordTruncation,
    /// Replace one binary infix keyword (with its spaces) by a single space.
    OperatorDeletion,
}

fn paren_positions(s: &str) -> Vec<usize> {
    s.char_indices().filter(|(_, c)| *c == '(' || *c == ')').map(|(i, _)| i).collect()
}

fn keyword_words(s: &str) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in s.char_indices().chain(std::iter::once((s.len(), ' '))) {
        if c.is_ascii_alphanumeric() || c == '_' {
            start.get_or_insert(i);
        } else if let Some(st) = start.take() {
            if i - st >= 3 && is_reserved_word(&s[st..i]) {
                out.push((st, i));
            }
        }
    }
    out
}

fn operator_spans(s: &str) -> Vec<(usize, usize)> {
    let mut out: Vec<(usize, usize)> = Vec::new();
    for op in INFIX {
        for (i, _) in s.match_indices(op) {
            // " until " inside " weakly until " is the same operator
            if !out.iter().any(|&(a, b)| i < b && a < i + op.len()) {
                out.push((i, i + op.len()));
            }
        }
    }
    out.sort();
    out
}

/// Applies one corruption of a kind that fits `s`, chosen uniformly.
pub fn corrupt_once(s: &str, rng: &mut impl Rng) -> Option<(Corruption, String)> {
    let mut kinds = Vec::new();
    if !paren_positions(s).is_empty() {
        kinds.push(Corruption::ParenDeletion);
    }
    if !keyword_words(s).is_empty() {
        kinds.push(Corruption::KeywordTruncation);
    }
    if !operator_spans(s).is_empty() {
        kinds.push(Corruption::OperatorDeletion);
    }
    let kind = *kinds.choose(rng)?;
    let mut out = s.to_string();
    match kind {
        Corruption::ParenDeletion => {
            let p = *paren_positions(s).choose(rng)?;
            out.remove(p);
        }
        Corruption::KeywordTruncation => {
            let (a, b) = *keyword_words(s).choose(rng)?;
            let drop = rng.gen_range(1..=2.min(b - a - 2));
            out.replace_range(b - drop..b, "");
        }
        Corruption::OperatorDeletion => {
            let (a, b) = *operator_spans(s).choose(rng)?;
            out.replace_range(a..b, " ");
        }
    }
    Some((kind, out))
}

/// Applies `n` successive corruptions.
pub fn corrupt(s: &str, n: usize, rng: &mut impl Rng) -> String {
    let mut out = s.to_string();
    for _ in 0..n {
        if let Some((_, next)) = corrupt_once(&out, rng) {
            out = next;
        }
    }
    out
}

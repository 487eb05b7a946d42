//! How often correctly produced n-grams were seen in the training targets.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::EvalError;

pub const MAX_NGRAM: usize = 4;

/// Exact γ columns reported by default.
pub const DEFAULT_GAMMAS: [usize; 8] = [0, 1, 2, 5, 10, 20, 50, 100];

/// Ranged bucket lower edges; the last bucket is open-ended.
pub const DEFAULT_GAMMA_EDGES: [usize; 5] = [0, 1, 5, 20, 100];

fn key<T: AsRef<str>>(gram: &[T]) -> String {
    let mut out = String::new();
    for (i, t) in gram.iter().enumerate() {
        if i > 0 {
            out.push(' ');
        }
        out.push_str(t.as_ref());
    }
    out
}

/// Distinct 1..=`max_n`-grams of a sentence.
pub fn uniq_ngrams<T: AsRef<str>>(tokens: &[T], max_n: usize) -> HashSet<String> {
    let mut grams = HashSet::new();
    for n in 1..=max_n.min(tokens.len()) {
        for w in tokens.windows(n) {
            grams.insert(key(w));
        }
    }
    grams
}

/// Number of training target sentences containing `gram` at least once.
pub fn occur<T: AsRef<str>, S: AsRef<[T]>>(gram: &[T], train_targets: &[S]) -> usize {
    let g = key(gram);
    let n = gram.len();
    train_targets
        .iter()
        .filter(|s| s.as_ref().windows(n).any(|w| key(w) == g))
        .count()
}

/// Sentence-level occurrence counts for every 1–4-gram of the training
/// targets, so that lookups are O(1).
#[derive(Debug, Clone, Default)]
pub struct OccurIndex {
    counts: HashMap<String, usize>,
}

impl OccurIndex {
    pub fn build<T: AsRef<str>, S: AsRef<[T]>>(train_targets: &[S]) -> Self {
        let mut counts = HashMap::new();
        for s in train_targets {
            for g in uniq_ngrams(s.as_ref(), MAX_NGRAM) {
                *counts.entry(g).or_insert(0) += 1;
            }
        }
        OccurIndex { counts }
    }

    pub fn occur<T: AsRef<str>>(&self, gram: &[T]) -> usize {
        self.counts.get(&key(gram)).copied().unwrap_or(0)
    }
}

/// Counts of n-grams shared by an output and its reference, keyed by how
/// many training sentences contain them. Each distinct n-gram counts once
/// per sentence.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GammaCounts {
    /// γ → number of correct n-grams (all orders) with occur = γ.
    pub by_occur: BTreeMap<usize, usize>,
    /// (n, γ) → number of correct n-grams of order n with occur = γ.
    pub by_order: BTreeMap<(usize, usize), usize>,
}

pub fn count_gamma<H, R, T>(
    outputs: &[H],
    references: &[R],
    index: &OccurIndex,
) -> Result<GammaCounts, EvalError>
where
    H: AsRef<[T]>,
    R: AsRef<[T]>,
    T: AsRef<str>,
{
    if outputs.len() != references.len() {
        return Err(EvalError::LengthMismatch {
            hyps: outputs.len(),
            refs: references.len(),
        });
    }
    let mut counts = GammaCounts::default();
    for (out, reference) in outputs.iter().zip(references) {
        let reference = uniq_ngrams(reference.as_ref(), MAX_NGRAM);
        for g in uniq_ngrams(out.as_ref(), MAX_NGRAM) {
            if !reference.contains(&g) {
                continue;
            }
            let gamma = index.counts.get(&g).copied().unwrap_or(0);
            let order = g.split(' ').count();
            *counts.by_occur.entry(gamma).or_insert(0) += 1;
            *counts.by_order.entry((order, gamma)).or_insert(0) += 1;
        }
    }
    Ok(counts)
}

impl GammaCounts {
    pub fn exact(&self, gamma: usize) -> usize {
        self.by_occur.get(&gamma).copied().unwrap_or(0)
    }

    /// Totals over `[edges[i], edges[i+1])`, the last bucket unbounded.
    pub fn ranged(&self, edges: &[usize]) -> Vec<usize> {
        let mut totals = vec![0; edges.len()];
        for (&gamma, &count) in &self.by_occur {
            if let Some(b) = edges.iter().rposition(|&e| e <= gamma) {
                totals[b] += count;
            }
        }
        totals
    }

    pub fn total(&self) -> usize {
        self.by_occur.values().sum()
    }
}

pub fn range_label(edges: &[usize], bucket: usize) -> String {
    let lo = edges[bucket];
    match edges.get(bucket + 1) {
        Some(&hi) if hi == lo + 1 => format!("{lo}"),
        Some(&hi) => format!("[{lo},{hi})"),
        None => format!("[{lo},inf)"),
    }
}

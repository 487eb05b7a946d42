//! Independent reference implementations and random instance generators
//! shared by the integration tests and the acceptance harness.
#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use transpiece::corpus::{AlignmentLink, ParallelExample, Sentence, Token};
use transpiece::decoding::{
    make_table_model, Listing, TableModel, TokenId, TranslationModel, EOS_ID,
};
use transpiece::pieces::{Piece, PieceTable, MAX_PIECE_LEN};

pub fn sentence_from(words: &[String]) -> Sentence {
    Sentence::new(
        words
            .iter()
            .map(|w| Token::new(w.clone()).unwrap())
            .collect(),
    )
    .unwrap()
}

/// Sentence of 1..=max_len words drawn from `w0..w{alphabet-1}`.
pub fn random_words(rng: &mut ChaCha8Rng, alphabet: usize, max_len: usize) -> Vec<String> {
    let len = rng.random_range(1..=max_len);
    (0..len)
        .map(|_| format!("w{}", rng.random_range(0..alphabet)))
        .collect()
}

pub fn random_alignment(
    rng: &mut ChaCha8Rng,
    src_len: usize,
    tgt_len: usize,
) -> Vec<AlignmentLink> {
    let density = rng.random_range(0.0..1.0);
    let mut links = Vec::new();
    for s in 0..src_len {
        for t in 0..tgt_len {
            if rng.random_bool(density / (src_len.max(tgt_len) as f64).sqrt()) {
                links.push(AlignmentLink { src: s, tgt: t });
            }
        }
    }
    links
}

pub fn random_example(
    rng: &mut ChaCha8Rng,
    id: usize,
    alphabet: usize,
    max_len: usize,
) -> ParallelExample {
    let src = random_words(rng, alphabet, max_len);
    let tgt: Vec<String> = random_words(rng, alphabet, max_len)
        .into_iter()
        .map(|w| w.replacen('w', "v", 1))
        .collect();
    let links = random_alignment(rng, src.len(), tgt.len());
    ParallelExample::new(id, sentence_from(&src), sentence_from(&tgt), links).unwrap()
}

/// Plain recursive Levenshtein with memoization.
pub fn reference_edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    fn go<T: PartialEq>(
        a: &[T],
        b: &[T],
        i: usize,
        j: usize,
        memo: &mut HashMap<(usize, usize), usize>,
    ) -> usize {
        if i == a.len() {
            return b.len() - j;
        }
        if j == b.len() {
            return a.len() - i;
        }
        if let Some(&v) = memo.get(&(i, j)) {
            return v;
        }
        let v = if a[i] == b[j] {
            go(a, b, i + 1, j + 1, memo)
        } else {
            1 + go(a, b, i + 1, j + 1, memo)
                .min(go(a, b, i + 1, j, memo))
                .min(go(a, b, i, j + 1, memo))
        };
        memo.insert((i, j), v);
        v
    }
    go(a, b, 0, 0, &mut HashMap::new())
}

/// Every target span of length 1..=4 whose target words are aligned only to
/// unedited source words.
pub fn brute_force_pieces(
    target: &[Token],
    alignment: &[AlignmentLink],
    unedited: &[usize],
) -> BTreeSet<Vec<String>> {
    let mut out = BTreeSet::new();
    for start in 0..target.len() {
        for len in 1..=MAX_PIECE_LEN {
            let end = start + len;
            if end > target.len() {
                break;
            }
            let ok = (start..end).all(|k| {
                alignment
                    .iter()
                    .filter(|l| l.tgt == k)
                    .all(|l| unedited.contains(&l.src))
            });
            if ok {
                out.insert(
                    target[start..end]
                        .iter()
                        .map(|t| t.as_str().to_string())
                        .collect(),
                );
            }
        }
    }
    out
}

/// A random table over `words`, closed under sub-spans. Scores are dyadic
/// rationals k/8 in (0, 1] when `dyadic`, arbitrary reals in (0, 1] otherwise.
pub fn random_closed_table(
    rng: &mut ChaCha8Rng,
    words: &[String],
    seeds: usize,
    dyadic: bool,
) -> HashMap<Vec<String>, f64> {
    let mut table = HashMap::new();
    for _ in 0..seeds {
        let len = rng.random_range(1..=MAX_PIECE_LEN);
        let gram: Vec<String> = (0..len)
            .map(|_| words[rng.random_range(0..words.len())].clone())
            .collect();
        for s in 0..len {
            for e in s + 1..=len {
                table.entry(gram[s..e].to_vec()).or_insert_with(|| {
                    if dyadic {
                        rng.random_range(1..=8) as f64 / 8.0
                    } else {
                        1.0 - rng.random_range(0.0..1.0)
                    }
                });
            }
        }
    }
    table
}

pub fn to_piece_table(table: &HashMap<Vec<String>, f64>) -> PieceTable {
    let scores = table
        .iter()
        .map(|(g, &s)| {
            let toks = g.iter().map(|w| Token::new(w.clone()).unwrap()).collect();
            (Piece::new(toks).unwrap(), s)
        })
        .collect();
    PieceTable::from_scores(scores).unwrap()
}

/// λ · Σ_{n=1..4} score(y_{t-n+1..t}) for candidate `u` after `history`,
/// looking every n-gram up directly.
pub fn direct_step_reward(
    history: &[String],
    u: &str,
    table: &HashMap<Vec<String>, f64>,
    lambda: f64,
) -> f64 {
    let mut total = 0.0;
    for n in 1..=MAX_PIECE_LEN {
        if n - 1 > history.len() {
            break;
        }
        let mut gram: Vec<String> = history[history.len() - (n - 1)..].to_vec();
        gram.push(u.to_string());
        if let Some(s) = table.get(&gram) {
            total += lambda * s;
        }
    }
    total
}

pub fn direct_sequence_reward(
    seq: &[String],
    table: &HashMap<Vec<String>, f64>,
    lambda: f64,
) -> f64 {
    (0..seq.len())
        .map(|t| direct_step_reward(&seq[..t], &seq[t], table, lambda))
        .sum()
}

/// A model over `words` + EOS listing a random distribution for every
/// prefix shorter than `max_len`. Some entries get probability zero.
pub fn random_full_model(
    rng: &mut ChaCha8Rng,
    source: &str,
    words: &[String],
    max_len: usize,
) -> TableModel {
    let mut outputs: Vec<String> = words.to_vec();
    outputs.push("</s>".to_string());
    let mut prefixes: Vec<Vec<String>> = vec![Vec::new()];
    let mut frontier = vec![Vec::new()];
    for _ in 1..max_len {
        let mut next = Vec::new();
        for p in &frontier {
            for w in words {
                let mut q: Vec<String> = p.clone();
                q.push(w.clone());
                next.push(q);
            }
        }
        prefixes.extend(next.iter().cloned());
        frontier = next;
    }
    let random_dist = |rng: &mut ChaCha8Rng| {
        let mut weights: Vec<f64> = outputs
            .iter()
            .map(|_| {
                if rng.random_bool(0.15) {
                    0.0
                } else {
                    rng.random_range(0.01..1.0)
                }
            })
            .collect();
        if weights.iter().all(|&w| w == 0.0) {
            weights[0] = 1.0;
        }
        let sum: f64 = weights.iter().sum();
        outputs
            .iter()
            .zip(weights)
            .filter(|(_, w)| *w > 0.0)
            .map(|(t, w)| (t.clone(), w / sum))
            .collect::<Vec<_>>()
    };
    let listings: Vec<Listing> = prefixes
        .into_iter()
        .map(|prefix| Listing {
            source: Some(source.to_string()),
            prefix,
            probs: random_dist(rng),
        })
        .collect();
    let uniform: Vec<(String, f64)> = outputs
        .iter()
        .map(|t| (t.clone(), 1.0 / outputs.len() as f64))
        .collect();
    make_table_model(listings, uniform).unwrap()
}

/// Best (tokens, normalized score) over every output the beam could
/// produce: sequences closed by EOS within `max_len` steps and unfinished
/// sequences of exactly `max_len` tokens.
pub fn exhaustive_decode<M: TranslationModel>(
    model: &M,
    source: &Sentence,
    table: &HashMap<Vec<String>, f64>,
    lambda: f64,
    max_len: usize,
) -> Option<(Vec<TokenId>, f64)> {
    let vocab = model.vocab();
    let mut best: Option<(Vec<TokenId>, f64)> = None;
    let mut stack: Vec<(Vec<TokenId>, f64)> = vec![(Vec::new(), 0.0)];
    while let Some((prefix, logp)) = stack.pop() {
        let dist = model.next_log_distribution(source, &prefix);
        for (id, &lp) in dist.iter().enumerate() {
            let id = id as TokenId;
            if id == transpiece::decoding::BOS_ID || lp == f64::NEG_INFINITY {
                continue;
            }
            let mut seq = prefix.clone();
            seq.push(id);
            let total = logp + lp;
            if id == EOS_ID || seq.len() == max_len {
                let words: Vec<String> = seq.iter().map(|&t| vocab.token(t).to_string()).collect();
                let reward = direct_sequence_reward(&words, table, lambda);
                let score = (total + reward) / seq.len() as f64;
                if best.as_ref().is_none_or(|(_, b)| score > *b) {
                    best = Some((seq, score));
                }
            } else {
                stack.push((seq, total));
            }
        }
    }
    best
}

//! Decode-time piece rewards.
//!
//! A [`PieceTable`] is compiled against a model vocabulary into a
//! [`RewardTable`]: the scored unigrams in id order plus a hash of the longer
//! n-grams. At every step only the unigrams are visited; for each one the
//! history is extended backwards one token at a time until the n-gram falls
//! out of the table. Because tables are closed under sub-spans, stopping at
//! the first miss gives the same total as summing over every n-gram length.

use std::collections::HashMap;

use crate::pieces::{PieceTable, MAX_PIECE_LEN};

use super::vocab::{TokenId, Vocab};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RewardTable {
    unigrams: Vec<(TokenId, f64)>,
    ngrams: HashMap<Vec<TokenId>, f64>,
}

impl RewardTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Pieces holding a token the model cannot emit are dropped; the rest
    /// keep their sub-spans, so closure survives compilation.
    pub fn compile(table: &PieceTable, vocab: &Vocab) -> Self {
        let mut unigrams = Vec::with_capacity(table.unigrams().len());
        let mut ngrams = HashMap::new();
        for (piece, score) in table.iter() {
            let ids: Option<Vec<TokenId>> = piece
                .tokens()
                .iter()
                .map(|t| vocab.id(t.as_str()))
                .collect();
            let Some(ids) = ids else { continue };
            if ids.len() == 1 {
                unigrams.push((ids[0], score));
            } else {
                ngrams.insert(ids, score);
            }
        }
        unigrams.sort_unstable_by_key(|&(id, _)| id);
        RewardTable { unigrams, ngrams }
    }

    pub fn is_empty(&self) -> bool {
        self.unigrams.is_empty()
    }

    pub fn unigrams(&self) -> &[(TokenId, f64)] {
        &self.unigrams
    }

    /// Score of an n-gram of any length, if present.
    pub fn score(&self, ids: &[TokenId]) -> Option<f64> {
        match ids.len() {
            0 => None,
            1 => self
                .unigrams
                .binary_search_by_key(&ids[0], |&(id, _)| id)
                .ok()
                .map(|i| self.unigrams[i].1),
            _ => self.ngrams.get(ids).copied(),
        }
    }

    /// Calls `f(token, λ·score)` once per matched n-gram ending in each
    /// rewarded token, shortest n-gram first.
    pub fn for_each_increment(
        &self,
        history: &[TokenId],
        lambda: f64,
        mut f: impl FnMut(TokenId, f64),
    ) {
        let mut key = [0 as TokenId; MAX_PIECE_LEN];
        for &(u, unigram_score) in &self.unigrams {
            f(u, lambda * unigram_score);
            for i in 1..MAX_PIECE_LEN {
                if history.len() < i {
                    break;
                }
                key[..i].copy_from_slice(&history[history.len() - i..]);
                key[i] = u;
                match self.ngrams.get(&key[..=i]) {
                    Some(&s) => f(u, lambda * s),
                    None => break,
                }
            }
        }
    }
}

/// Adds piece rewards in place to a next-token score vector. Entries for
/// tokens that are not rewarded unigrams are left untouched.
pub fn apply_piece_rewards(
    scores: &mut [f64],
    history: &[TokenId],
    table: &RewardTable,
    lambda: f64,
) {
    table.for_each_increment(history, lambda, |u, inc| scores[u as usize] += inc);
}

/// Total reward per rewarded token for the next step, in id order.
pub fn step_rewards(history: &[TokenId], table: &RewardTable, lambda: f64) -> Vec<(TokenId, f64)> {
    let mut out: Vec<(TokenId, f64)> = Vec::with_capacity(table.unigrams.len());
    table.for_each_increment(history, lambda, |u, inc| match out.last_mut() {
        Some((last, total)) if *last == u => *total += inc,
        _ => out.push((u, inc)),
    });
    out
}

/// Reward a whole output sequence collects, accumulated step by step the
/// same way beam search accumulates it.
pub fn sequence_reward(tokens: &[TokenId], table: &RewardTable, lambda: f64) -> f64 {
    let mut total = 0.0;
    for t in 0..tokens.len() {
        let rewards = step_rewards(&tokens[..t], table, lambda);
        let r = rewards
            .binary_search_by_key(&tokens[t], |&(id, _)| id)
            .map_or(0.0, |i| rewards[i].1);
        total += r;
    }
    total
}

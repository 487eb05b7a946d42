mod common;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use transpiece::decoding::{
    apply_piece_rewards, sequence_reward, step_rewards, RewardTable, TokenId, Vocab,
};

fn setup(
    rng: &mut ChaCha8Rng,
    dyadic: bool,
) -> (
    Vocab,
    Vec<String>,
    std::collections::HashMap<Vec<String>, f64>,
    RewardTable,
) {
    let words: Vec<String> = (0..rng.random_range(2..7))
        .map(|i| format!("w{i}"))
        .collect();
    let vocab = Vocab::new(words.iter().map(String::as_str));
    let seeds = rng.random_range(0..12);
    let table = random_closed_table(rng, &words, seeds, dyadic);
    let compiled = RewardTable::compile(&to_piece_table(&table), &vocab);
    (vocab, words, table, compiled)
}

fn random_history(rng: &mut ChaCha8Rng, vocab: &Vocab) -> Vec<TokenId> {
    let len = rng.random_range(0..8);
    (0..len)
        .map(|_| rng.random_range(2..vocab.len() as TokenId))
        .collect()
}

fn names(vocab: &Vocab, ids: &[TokenId]) -> Vec<String> {
    ids.iter().map(|&t| vocab.token(t).to_string()).collect()
}

#[test]
fn step_scores_match_direct_evaluation_exactly_for_dyadic_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..1500 {
        let (vocab, _, table, compiled) = setup(&mut rng, true);
        let lambda = rng.random_range(0..=8) as f64 / 4.0;
        let history = random_history(&mut rng, &vocab);
        let base: Vec<f64> = (0..vocab.len())
            .map(|_| -(rng.random_range(0..64) as f64) / 16.0)
            .collect();
        let mut scores = base.clone();
        apply_piece_rewards(&mut scores, &history, &compiled, lambda);
        let h = names(&vocab, &history);
        for u in 0..vocab.len() {
            let want = base[u] + direct_step_reward(&h, vocab.token(u as TokenId), &table, lambda);
            assert_eq!(scores[u], want, "u={} h={h:?}", vocab.token(u as TokenId));
        }
    }
}

#[test]
fn step_scores_match_direct_evaluation_for_real_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    for _ in 0..1500 {
        let (vocab, _, table, compiled) = setup(&mut rng, false);
        let lambda = rng.random_range(0.0..3.0);
        let history = random_history(&mut rng, &vocab);
        let base: Vec<f64> = (0..vocab.len())
            .map(|_| -rng.random_range(0.0..5.0))
            .collect();
        let mut scores = base.clone();
        apply_piece_rewards(&mut scores, &history, &compiled, lambda);
        let h = names(&vocab, &history);
        for u in 0..vocab.len() {
            let want = base[u] + direct_step_reward(&h, vocab.token(u as TokenId), &table, lambda);
            assert!((scores[u] - want).abs() <= 1e-12);
        }
        // the sparse form agrees with the dense one
        for (u, r) in step_rewards(&history, &compiled, lambda) {
            assert!((base[u as usize] + r - scores[u as usize]).abs() <= 1e-12);
        }
    }
}

#[test]
fn trajectory_totals_match_direct_evaluation() {
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    for i in 0..1500 {
        let dyadic = i % 2 == 0;
        let (vocab, _, table, compiled) = setup(&mut rng, dyadic);
        let lambda = if dyadic {
            rng.random_range(0..=8) as f64 / 4.0
        } else {
            rng.random_range(0.0..3.0)
        };
        let seq = random_history(&mut rng, &vocab);
        let got = sequence_reward(&seq, &compiled, lambda);
        let want = direct_sequence_reward(&names(&vocab, &seq), &table, lambda);
        if dyadic {
            assert_eq!(got, want);
        } else {
            assert!((got - want).abs() <= 1e-12);
        }
    }
}

#[test]
fn zero_lambda_leaves_scores_untouched() {
    let mut rng = ChaCha8Rng::seed_from_u64(34);
    for _ in 0..200 {
        let (vocab, _, _, compiled) = setup(&mut rng, false);
        let history = random_history(&mut rng, &vocab);
        let base: Vec<f64> = (0..vocab.len())
            .map(|_| -rng.random_range(0.0..5.0))
            .collect();
        let mut scores = base.clone();
        apply_piece_rewards(&mut scores, &history, &compiled, 0.0);
        assert_eq!(scores, base);
    }
}

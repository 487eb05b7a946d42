mod common;

use std::collections::{BTreeSet, HashMap};

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;
use transpiece::pieces::{build_piece_table, collect_pieces_single, PieceTable};
use transpiece::similarity::compute_match;

fn collected_strings(pieces: &BTreeSet<transpiece::Piece>) -> BTreeSet<Vec<String>> {
    pieces
        .iter()
        .map(|p| p.tokens().iter().map(|t| t.as_str().to_string()).collect())
        .collect()
}

#[test]
fn single_match_collection_equals_span_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for id in 0..1500 {
        let ex = random_example(&mut rng, id, 4, 12);
        let x = sentence_from(&random_words(&mut rng, 4, 12));
        let m = compute_match(&x, &ex);
        let got = collected_strings(&collect_pieces_single(&m));
        let want = brute_force_pieces(ex.target.tokens(), &ex.alignment, &m.unedited);
        assert_eq!(got, want, "x={x} src={} tgt={}", ex.source, ex.target);
    }
}

#[test]
fn table_scores_are_best_similarity_over_producing_matches() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..300 {
        let x = sentence_from(&random_words(&mut rng, 4, 10));
        let examples: Vec<_> = (0..rng.random_range(0..6))
            .map(|id| random_example(&mut rng, id, 4, 10))
            .collect();
        let matches: Vec<_> = examples.iter().map(|e| compute_match(&x, e)).collect();
        let mut want: HashMap<Vec<String>, f64> = HashMap::new();
        for m in &matches {
            if m.similarity <= 0.0 {
                continue;
            }
            for g in
                brute_force_pieces(m.example.target.tokens(), &m.example.alignment, &m.unedited)
            {
                let e = want.entry(g).or_insert(m.similarity);
                *e = e.max(m.similarity);
            }
        }
        let table = build_piece_table(&matches);
        assert_eq!(table.len(), want.len());
        for (g, s) in &want {
            let toks: Vec<_> = g
                .iter()
                .map(|w| transpiece::Token::new(w.clone()).unwrap())
                .collect();
            assert_eq!(table.score(&toks), Some(*s));
        }
    }
}

#[test]
fn identical_input_scores_every_piece_one() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for id in 0..200 {
        let ex = random_example(&mut rng, id, 6, 12);
        let m = compute_match(&ex.source, &ex);
        assert_eq!(m.similarity, 1.0);
        let table = build_piece_table(&[m]);
        assert!(table.iter().all(|(_, s)| s == 1.0));
        // nothing is blocked, so every span up to four words is present
        let n = ex.target.len();
        let spans: usize = (1..=4.min(n)).map(|l| n - l + 1).sum();
        assert!(table.len() <= spans);
    }
}

#[test]
fn empty_match_set_gives_empty_table() {
    assert!(build_piece_table(&[]).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn tables_are_closed_and_monotone(seed in any::<u64>(), n_matches in 0usize..6, alphabet in 2usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sentence_from(&random_words(&mut rng, alphabet, 12));
        let examples: Vec<_> = (0..n_matches)
            .map(|id| random_example(&mut rng, id, alphabet, 12))
            .collect();
        let matches: Vec<_> = examples.iter().map(|e| compute_match(&x, e)).collect();
        let table = build_piece_table(&matches);
        prop_assert!(table.check_closure().is_ok());
        prop_assert!(table.is_monotone());
        prop_assert!(table.iter().all(|(p, s)| p.len() <= 4 && s > 0.0 && s <= 1.0));
    }

    #[test]
    fn tsv_round_trip_preserves_pieces(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = sentence_from(&random_words(&mut rng, 4, 10));
        let examples: Vec<_> = (0..4).map(|id| random_example(&mut rng, id, 4, 10)).collect();
        let matches: Vec<_> = examples.iter().map(|e| compute_match(&x, e)).collect();
        let table = build_piece_table(&matches);
        let text = table.to_tsv();
        let back = PieceTable::from_tsv(&text).unwrap();
        prop_assert_eq!(back.len(), table.len());
        for (p, s) in table.iter() {
            let r = back.score(p.tokens()).unwrap();
            prop_assert!((r - s).abs() <= 5e-7);
        }
        prop_assert_eq!(back.to_tsv(), text);
    }
}

//! Corpus BLEU, similarity statistics and n-gram frequency analysis.

mod bleu;
mod ngram_stats;
mod similarity_stats;

pub use bleu::{corpus_bleu, length_ratio, sentence_bleu, BLEU_MAX_ORDER};
pub use ngram_stats::{
    count_gamma, occur, range_label, uniq_ngrams, GammaCounts, OccurIndex, DEFAULT_GAMMAS,
    DEFAULT_GAMMA_EDGES, MAX_NGRAM,
};
pub use similarity_stats::{
    bucket_label, histogram_bucket, mean, per_sentence_similarity, similarity_histogram,
    similarity_to_train, split_half_by_similarity, testset_similarity, SimilarityHistogram,
    HISTOGRAM_BUCKETS,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("{hyps} hypotheses but {refs} references")]
    LengthMismatch { hyps: usize, refs: usize },
    #[error("similarity {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("need at least 2 sentences to split, got {0}")]
    TooFewSentences(usize),
    #[error("references are empty")]
    EmptyReference,
}

//! Beam search over a pluggable translation model with n-gram piece rewards.
//!
//! At every step the reward `λ · Σ_n score(y[t-n+1..=t])` for n = 1..4 is
//! added to the model's log-probability of the candidate token. The sum is
//! not renormalized. Finished hypotheses are ranked by their combined score
//! divided by output length.

mod beam;
mod lexicon_model;
mod model;
mod pipeline;
mod reward;
mod table_model;
mod vocab;

pub use beam::{beam_search, beam_search_compiled, DecodeResult, Hypothesis};
pub use lexicon_model::{
    make_lexicon_model, Lexicon, LexiconEntry, LexiconError, LexiconModel, DEFAULT_CONFUSION_SIZE,
    UNK,
};
pub use model::{log_sum_exp, validate_distribution, TranslationModel, NORMALIZATION_TOLERANCE};
pub use pipeline::{
    guided_translate, retrieve_matches, retrieve_piece_table, Pipeline, RewardMode,
};
pub use reward::{apply_piece_rewards, sequence_reward, step_rewards, RewardTable};
pub use table_model::{
    make_table_model, parse_table_model, Listing, ModelError, TableModel, LISTING_TOLERANCE,
};
pub use vocab::{TokenId, Vocab, BOS, BOS_ID, EOS, EOS_ID};

/// Reward weight used when none is given.
pub const DEFAULT_LAMBDA: f64 = 1.5;
pub const DEFAULT_BEAM_SIZE: usize = 5;

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeConfig {
    /// Reward weight λ, finite and non-negative.
    pub lambda: f64,
    pub beam_size: usize,
    /// Output length cap including EOS; `None` means `2·|X| + 10`.
    pub max_output_len: Option<usize>,
}

impl Default for DecodeConfig {
    fn default() -> Self {
        DecodeConfig {
            lambda: DEFAULT_LAMBDA,
            beam_size: DEFAULT_BEAM_SIZE,
            max_output_len: None,
        }
    }
}

impl DecodeConfig {
    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_beam_size(mut self, beam_size: usize) -> Self {
        self.beam_size = beam_size;
        self
    }

    pub fn with_max_output_len(mut self, max: usize) -> Self {
        self.max_output_len = Some(max);
        self
    }

    pub fn max_len_for(&self, source_len: usize) -> usize {
        self.max_output_len.unwrap_or(2 * source_len + 10)
    }

    pub fn validate(&self) -> Result<(), DecodeError> {
        if self.beam_size == 0 {
            return Err(DecodeError::InvalidConfig(
                "beam size must be at least 1".into(),
            ));
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(DecodeError::InvalidConfig(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        if self.max_output_len == Some(0) {
            return Err(DecodeError::InvalidConfig(
                "max output length must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DecodeError {
    #[error("model returned {got} scores for a vocabulary of {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("model distribution is not normalized (log mass {log_mass})")]
    NotNormalized { log_mass: f64 },
    #[error("invalid decode configuration: {0}")]
    InvalidConfig(String),
    #[error("no hypothesis could be expanded")]
    NoHypothesis,
}

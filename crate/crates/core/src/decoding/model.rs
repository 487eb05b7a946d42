use crate::corpus::Sentence;

use super::vocab::{TokenId, Vocab};
use super::DecodeError;

/// Tolerance on `|log Σ exp(v)|` for a returned distribution.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-6;

/// A conditional next-token model over a fixed target vocabulary.
///
/// `prefix` holds the tokens generated so far, without BOS. The returned
/// vector is indexed by vocabulary id and holds log-probabilities.
pub trait TranslationModel {
    fn vocab(&self) -> &Vocab;

    fn next_log_distribution(&self, source: &Sentence, prefix: &[TokenId]) -> Vec<f64>;
}

impl<M: TranslationModel + ?Sized> TranslationModel for &M {
    fn vocab(&self) -> &Vocab {
        (**self).vocab()
    }

    fn next_log_distribution(&self, source: &Sentence, prefix: &[TokenId]) -> Vec<f64> {
        (**self).next_log_distribution(source, prefix)
    }
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY || !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

pub fn validate_distribution(dist: &[f64], vocab_len: usize) -> Result<(), DecodeError> {
    if dist.len() != vocab_len {
        return Err(DecodeError::WrongLength {
            expected: vocab_len,
            got: dist.len(),
        });
    }
    if dist.iter().any(|v| v.is_nan() || *v == f64::INFINITY) {
        return Err(DecodeError::NotNormalized { log_mass: f64::NAN });
    }
    let log_mass = log_sum_exp(dist);
    if log_mass.is_nan() || log_mass.abs() > NORMALIZATION_TOLERANCE {
        return Err(DecodeError::NotNormalized { log_mass });
    }
    Ok(())
}

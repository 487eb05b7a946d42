use std::collections::HashMap;
use std::hash::Hash;

use super::EvalError;

pub const BLEU_MAX_ORDER: usize = 4;

fn ngram_counts<T: Eq + Hash>(tokens: &[T], n: usize) -> HashMap<&[T], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for w in tokens.windows(n) {
            *counts.entry(w).or_insert(0) += 1;
        }
    }
    counts
}

/// Clipped match count and candidate n-gram count for one sentence pair.
fn clipped<T: Eq + Hash>(hyp: &[T], reference: &[T], n: usize) -> (usize, usize) {
    let h = ngram_counts(hyp, n);
    let r = ngram_counts(reference, n);
    let matched = h
        .iter()
        .map(|(g, &c)| c.min(r.get(g).copied().unwrap_or(0)))
        .sum();
    (matched, hyp.len().saturating_sub(n - 1))
}

fn check_lengths(hyps: usize, refs: usize) -> Result<(), EvalError> {
    if hyps != refs {
        return Err(EvalError::LengthMismatch { hyps, refs });
    }
    Ok(())
}

/// Corpus BLEU in [0, 100]: clipped 1–4-gram precisions pooled over the
/// corpus, geometric mean, brevity penalty, no smoothing.
pub fn corpus_bleu<H, R, T>(hyps: &[H], refs: &[R]) -> Result<f64, EvalError>
where
    H: AsRef<[T]>,
    R: AsRef<[T]>,
    T: Eq + Hash,
{
    check_lengths(hyps.len(), refs.len())?;
    let mut matched = [0usize; BLEU_MAX_ORDER];
    let mut total = [0usize; BLEU_MAX_ORDER];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);
    for (h, r) in hyps.iter().zip(refs) {
        let (h, r) = (h.as_ref(), r.as_ref());
        hyp_len += h.len();
        ref_len += r.len();
        for n in 1..=BLEU_MAX_ORDER {
            let (m, t) = clipped(h, r, n);
            matched[n - 1] += m;
            total[n - 1] += t;
        }
    }
    if matched.contains(&0) || hyp_len == 0 {
        return Ok(0.0);
    }
    let log_precision: f64 = (0..BLEU_MAX_ORDER)
        .map(|i| (matched[i] as f64 / total[i] as f64).ln())
        .sum::<f64>()
        / BLEU_MAX_ORDER as f64;
    let brevity = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(100.0 * brevity * log_precision.exp())
}

/// Add-one smoothed sentence BLEU for orders above one; for diagnostics.
pub fn sentence_bleu<T: Eq + Hash>(hyp: &[T], reference: &[T]) -> f64 {
    if hyp.is_empty() {
        return 0.0;
    }
    let mut log_precision = 0.0;
    for n in 1..=BLEU_MAX_ORDER {
        let (m, t) = clipped(hyp, reference, n);
        let p = if n == 1 {
            if m == 0 {
                return 0.0;
            }
            m as f64 / t as f64
        } else {
            (m as f64 + 1.0) / (t as f64 + 1.0)
        };
        log_precision += p.ln();
    }
    let (c, r) = (hyp.len() as f64, reference.len() as f64);
    let brevity = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * brevity * (log_precision / BLEU_MAX_ORDER as f64).exp()
}

/// Total hypothesis tokens over total reference tokens.
pub fn length_ratio<H, R, T>(hyps: &[H], refs: &[R]) -> Result<f64, EvalError>
where
    H: AsRef<[T]>,
    R: AsRef<[T]>,
{
    check_lengths(hyps.len(), refs.len())?;
    let h: usize = hyps.iter().map(|x| x.as_ref().len()).sum();
    let r: usize = refs.iter().map(|x| x.as_ref().len()).sum();
    if r == 0 {
        return Err(EvalError::EmptyReference);
    }
    Ok(h as f64 / r as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Vec<&str> {
        text.split(' ').collect()
    }

    #[test]
    fn identical_is_100() {
        let h = vec![w("a b c d e"), w("x y z w")];
        assert!((corpus_bleu(&h, &h).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn brevity_penalty_hand_example() {
        let b = corpus_bleu(&[w("a b c d")], &[w("a b c d e")]).unwrap();
        assert!((b - 100.0 * (1.0f64 - 5.0 / 4.0).exp()).abs() < 1e-9);
        assert!((b - 77.88).abs() < 0.01);
    }

    #[test]
    fn no_four_gram_match_is_zero() {
        assert_eq!(corpus_bleu(&[w("a b c d")], &[w("a b c x")]).unwrap(), 0.0);
        assert_eq!(corpus_bleu(&[w("a b")], &[w("a b")]).unwrap(), 0.0);
    }

    #[test]
    fn clipping() {
        // "the the the the" vs "the cat": unigram precision clipped to 1/4
        let (m, t) = clipped(&w("the the the the"), &w("the cat"), 1);
        assert_eq!((m, t), (1, 4));
    }

    #[test]
    fn length_mismatch_is_an_error() {
        assert!(corpus_bleu(&[w("a")], &[w("a"), w("b")]).is_err());
        assert!(length_ratio::<_, _, &str>(&[w("a")], &[w("a"), w("b")]).is_err());
    }

    #[test]
    fn ratio() {
        let h = vec![w("a b c d e"), w("a b c d e")];
        let r = vec![w("a b c d"), w("a b c d")];
        assert_eq!(length_ratio(&h, &r).unwrap(), 1.25);
        assert_eq!(length_ratio(&h, &h).unwrap(), 1.0);
    }

    #[test]
    fn sentence_bleu_bounds() {
        assert!((sentence_bleu(&w("a b c d"), &w("a b c d")) - 100.0).abs() < 1e-9);
        assert_eq!(sentence_bleu(&w("x"), &w("a")), 0.0);
        let s = sentence_bleu(&w("a b x d"), &w("a b c d"));
        assert!(s > 0.0 && s < 100.0);
    }
}

use crate::corpus::Sentence;
use crate::retrieval::Retriever;
use crate::similarity::{sentence_similarity, RetrievedMatch};
use crate::{corpus::ParallelCorpus, par, par::Execution};

use super::EvalError;

/// Best similarity among the retrieved matches, 0 when nothing was retrieved.
pub fn similarity_to_train(matches: &[RetrievedMatch<'_>]) -> f64 {
    matches.iter().map(|m| m.similarity).fold(0.0, f64::max)
}

/// Similarity of each test sentence to its top-`m` retrieved sources.
pub fn per_sentence_similarity<R: Retriever + Sync + ?Sized>(
    test: &[Sentence],
    corpus: &ParallelCorpus,
    retriever: &R,
    m: usize,
    exec: Execution,
) -> Vec<f64> {
    par::map(test, exec, |x| {
        retriever
            .search(x, m)
            .into_iter()
            .filter_map(|c| corpus.get(c.example_id))
            .map(|ex| sentence_similarity(x, &ex.source))
            .fold(0.0, f64::max)
    })
}

/// Mean per-sentence similarity; 0 for an empty test set.
pub fn testset_similarity<R: Retriever + Sync + ?Sized>(
    test: &[Sentence],
    corpus: &ParallelCorpus,
    retriever: &R,
    m: usize,
    exec: Execution,
) -> f64 {
    mean(&per_sentence_similarity(test, corpus, retriever, m, exec))
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Splits test positions into the more similar half (`⌈n/2⌉` sentences) and
/// the rest. Equal similarities keep their original order. Both halves are
/// returned as ascending positions.
pub fn split_half_by_similarity(
    similarities: &[f64],
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if similarities.len() < 2 {
        return Err(EvalError::TooFewSentences(similarities.len()));
    }
    let mut order: Vec<usize> = (0..similarities.len()).collect();
    order.sort_by(|&a, &b| similarities[b].total_cmp(&similarities[a]));
    let cut = similarities.len().div_ceil(2);
    let mut high = order[..cut].to_vec();
    let mut low = order[cut..].to_vec();
    high.sort_unstable();
    low.sort_unstable();
    Ok((high, low))
}

pub const HISTOGRAM_BUCKETS: usize = 11;

/// Counts over `[0,0.1)`, …, `[0.9,1)` and exactly `1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimilarityHistogram {
    pub counts: [usize; HISTOGRAM_BUCKETS],
}

// Values within this distance below a decile boundary count as on it, so
// that e.g. a similarity of 0.3 computed as 0.29999999999999993 lands in
// [0.3,0.4).
const BOUNDARY_SLACK: f64 = 1e-9;

pub fn histogram_bucket(value: f64) -> Result<usize, EvalError> {
    if !(0.0..=1.0).contains(&value) {
        return Err(EvalError::OutOfRange(value));
    }
    if value == 1.0 {
        return Ok(HISTOGRAM_BUCKETS - 1);
    }
    Ok(((value * 10.0 + BOUNDARY_SLACK).floor() as usize).min(9))
}

pub fn bucket_label(bucket: usize) -> String {
    match bucket {
        10 => "1".to_string(),
        0 => "[0,0.1)".to_string(),
        9 => "[0.9,1)".to_string(),
        b => format!("[0.{},0.{})", b, b + 1),
    }
}

pub fn similarity_histogram(similarities: &[f64]) -> Result<SimilarityHistogram, EvalError> {
    let mut counts = [0usize; HISTOGRAM_BUCKETS];
    for &s in similarities {
        counts[histogram_bucket(s)?] += 1;
    }
    Ok(SimilarityHistogram { counts })
}

impl SimilarityHistogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Percentages rounded to one decimal.
    pub fn percents(&self) -> [f64; HISTOGRAM_BUCKETS] {
        let total = self.total().max(1) as f64;
        self.counts
            .map(|c| (1000.0 * c as f64 / total).round() / 10.0)
    }

    /// TSV with header `similarity\tsentences\tpercent`.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("similarity\tsentences\tpercent\n");
        for (b, (count, pct)) in self.counts.iter().zip(self.percents()).enumerate() {
            out.push_str(&format!("{}\t{}\t{:.1}%\n", bucket_label(b), count, pct));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_two() {
        assert_eq!(
            split_half_by_similarity(&[0.9, 0.1]).unwrap(),
            (vec![0], vec![1])
        );
        assert_eq!(
            split_half_by_similarity(&[0.1, 0.9]).unwrap(),
            (vec![1], vec![0])
        );
        assert!(split_half_by_similarity(&[0.5]).is_err());
    }

    #[test]
    fn split_ties_by_position() {
        let (h, l) = split_half_by_similarity(&[0.5; 5]).unwrap();
        assert_eq!(h, vec![0, 1, 2]);
        assert_eq!(l, vec![3, 4]);
    }

    #[test]
    fn buckets() {
        assert_eq!(histogram_bucket(1.0).unwrap(), 10);
        assert_eq!(histogram_bucket(0.1).unwrap(), 1);
        assert_eq!(histogram_bucket(0.0).unwrap(), 0);
        assert_eq!(histogram_bucket(0.999).unwrap(), 9);
        assert_eq!(histogram_bucket(1.0 - 3.0 / 10.0).unwrap(), 7);
        assert_eq!(histogram_bucket(1.0 - 7.0 / 10.0).unwrap(), 3);
        assert!(histogram_bucket(1.2).is_err());
        assert!(histogram_bucket(-0.1).is_err());
        assert!(histogram_bucket(f64::NAN).is_err());
    }

    #[test]
    fn labels_match_decile_scheme() {
        let labels: Vec<String> = (0..HISTOGRAM_BUCKETS).map(bucket_label).collect();
        assert_eq!(labels[0], "[0,0.1)");
        assert_eq!(labels[3], "[0.3,0.4)");
        assert_eq!(labels[9], "[0.9,1)");
        assert_eq!(labels[10], "1");
    }

    #[test]
    fn all_ones() {
        let h = similarity_histogram(&[1.0; 7]).unwrap();
        assert_eq!(h.counts[10], 7);
        assert_eq!(h.total(), 7);
        assert!((h.percents().iter().sum::<f64>() - 100.0).abs() <= 0.2);
    }

    #[test]
    fn mean_of_two() {
        assert_eq!(mean(&[0.4, 0.6]), 0.5);
        assert_eq!(mean(&[]), 0.0);
    }
}

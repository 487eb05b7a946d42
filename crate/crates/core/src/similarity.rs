//! Word-level edit distance, unedited-word extraction and sentence similarity.

use crate::corpus::{ParallelExample, Sentence};

/// Edit distance plus the retrieved-side positions matched at zero cost on
/// the canonical optimal backtrace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EditResult {
    pub distance: usize,
    /// Ascending positions into the retrieved sentence.
    pub unedited: Vec<usize>,
}

/// Levenshtein distance over tokens with a canonical backtrace.
///
/// `x` is the input sentence and `retrieved` the sentence whose unedited
/// positions are reported. When several optimal paths exist the backtrace,
/// walking back from the terminal cell, prefers match, then substitution,
/// then deletion of a retrieved word, then insertion of an input word.
pub fn edit_distance_with_matches<T: PartialEq>(x: &[T], retrieved: &[T]) -> EditResult {
    let n = x.len();
    let m = retrieved.len();
    let width = m + 1;
    let mut dp = vec![0u32; (n + 1) * width];
    for (j, cell) in dp[..width].iter_mut().enumerate() {
        *cell = j as u32;
    }
    for i in 1..=n {
        let row = i * width;
        let prev = row - width;
        dp[row] = i as u32;
        for j in 1..=m {
            let diag = dp[prev + j - 1] + u32::from(x[i - 1] != retrieved[j - 1]);
            let left = dp[row + j - 1] + 1;
            let up = dp[prev + j] + 1;
            dp[row + j] = diag.min(left).min(up);
        }
    }

    let at = |i: usize, j: usize| dp[i * width + j];
    let mut unedited = Vec::new();
    let (mut i, mut j) = (n, m);
    while i > 0 || j > 0 {
        let here = at(i, j);
        if i > 0 && j > 0 {
            let diag = at(i - 1, j - 1);
            if x[i - 1] == retrieved[j - 1] && diag == here {
                unedited.push(j - 1);
                i -= 1;
                j -= 1;
                continue;
            }
            if diag + 1 == here {
                i -= 1;
                j -= 1;
                continue;
            }
        }
        if j > 0 && at(i, j - 1) + 1 == here {
            j -= 1;
        } else {
            i -= 1;
        }
    }
    unedited.reverse();
    EditResult {
        distance: at(n, m) as usize,
        unedited,
    }
}

/// Distance only, in two rows of memory.
pub fn edit_distance<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0usize; b.len() + 1];
    for (i, ai) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, bj) in b.iter().enumerate() {
            let diag = prev[j] + usize::from(ai != bj);
            cur[j + 1] = diag.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

/// `1 - d / max(|a|, |b|)`; 1.0 when both are empty.
pub fn similarity_from_distance(distance: usize, len_a: usize, len_b: usize) -> f64 {
    let longest = len_a.max(len_b);
    if longest == 0 {
        return 1.0;
    }
    1.0 - distance as f64 / longest as f64
}

pub fn sentence_similarity(x: &Sentence, retrieved: &Sentence) -> f64 {
    let d = edit_distance(x.tokens(), retrieved.tokens());
    similarity_from_distance(d, x.len(), retrieved.len())
}

/// A retrieved example scored against an input sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievedMatch<'a> {
    pub example: &'a ParallelExample,
    pub distance: usize,
    pub unedited: Vec<usize>,
    pub similarity: f64,
}

pub fn compute_match<'a>(x: &Sentence, example: &'a ParallelExample) -> RetrievedMatch<'a> {
    let EditResult { distance, unedited } =
        edit_distance_with_matches(x.tokens(), example.source.tokens());
    RetrievedMatch {
        example,
        distance,
        unedited,
        similarity: similarity_from_distance(distance, x.len(), example.source.len()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(text: &str) -> Vec<&str> {
        text.split(' ').collect()
    }

    #[test]
    fn identical() {
        let r = edit_distance_with_matches(&w("a b c"), &w("a b c"));
        assert_eq!(
            r,
            EditResult {
                distance: 0,
                unedited: vec![0, 1, 2]
            }
        );
    }

    #[test]
    fn one_substitution() {
        let r = edit_distance_with_matches(&w("a b c"), &w("a x c"));
        assert_eq!(
            r,
            EditResult {
                distance: 1,
                unedited: vec![0, 2]
            }
        );
    }

    #[test]
    fn disjoint() {
        let r = edit_distance_with_matches(&w("a b"), &w("c d e"));
        assert_eq!(
            r,
            EditResult {
                distance: 3,
                unedited: vec![]
            }
        );
        assert_eq!(edit_distance(&w("a b c"), &w("d e f g h")), 5);
        assert_eq!(similarity_from_distance(5, 3, 5), 0.0);
    }

    #[test]
    fn one_substitution_of_four() {
        let x = Sentence::parse("a b c d").unwrap();
        let y = Sentence::parse("a b x d").unwrap();
        assert_eq!(sentence_similarity(&x, &y), 0.75);
        assert_eq!(sentence_similarity(&x, &x), 1.0);
    }

    #[test]
    fn tie_prefers_substitution_over_shift() {
        // "a z" vs "y a": two substitutions or delete-match-insert both cost 2
        let r = edit_distance_with_matches(&w("a z"), &w("y a"));
        assert_eq!(r.distance, 2);
        assert!(r.unedited.is_empty());
    }

    #[test]
    fn repeated_tokens_are_position_aware() {
        // only the second "a" of the retrieved side survives unedited
        let r = edit_distance_with_matches(&w("b a"), &w("a c a"));
        assert_eq!(r.distance, 2);
        assert_eq!(r.unedited, vec![2]);
    }

    #[test]
    fn case_sensitive() {
        assert_eq!(edit_distance(&w("A"), &w("a")), 1);
    }
}

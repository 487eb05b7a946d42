//! Lexical retrieval of similar source sentences.
//!
//! The index maps each source token to the sorted ids of the sentences that
//! contain it. Scoring is additive idf over the distinct query tokens a
//! document shares with the query; exact edit distance does the fine
//! ranking later, so the retriever only has to provide recall.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use crate::corpus::{ParallelCorpus, Sentence, Token};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub example_id: usize,
    pub lexical_score: f64,
}

/// Anything that can propose the `limit` most promising examples for a query.
pub trait Retriever {
    fn search(&self, query: &Sentence, limit: usize) -> Vec<Candidate>;
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct InvertedIndex {
    postings: HashMap<String, Vec<u32>>,
    doc_count: usize,
}

const MAGIC: &str = "transpiece-index 1";

#[derive(Debug, thiserror::Error)]
pub enum IndexError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

fn parse_err(line: usize, message: impl Into<String>) -> IndexError {
    IndexError::Parse {
        line,
        message: message.into(),
    }
}

/// Builds the index over the source side of `corpus`.
pub fn build_index(corpus: &ParallelCorpus) -> InvertedIndex {
    let mut postings: HashMap<String, Vec<u32>> = HashMap::new();
    let mut seen: HashSet<&str> = HashSet::new();
    for ex in corpus {
        seen.clear();
        for tok in ex.source.iter() {
            if seen.insert(tok.as_str()) {
                postings
                    .entry(tok.as_str().to_owned())
                    .or_default()
                    .push(ex.id as u32);
            }
        }
    }
    InvertedIndex {
        postings,
        doc_count: corpus.len(),
    }
}

impl InvertedIndex {
    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn term_count(&self) -> usize {
        self.postings.len()
    }

    /// Sorted ids of source sentences containing `token`; empty if unseen.
    pub fn postings(&self, token: &str) -> &[u32] {
        self.postings.get(token).map_or(&[], Vec::as_slice)
    }

    pub fn doc_freq(&self, token: &str) -> usize {
        self.postings(token).len()
    }

    /// `ln((N + 1) / (df + 1)) + 1`
    pub fn idf(&self, token: &str) -> f64 {
        let n = self.doc_count as f64;
        let df = self.doc_freq(token) as f64;
        ((n + 1.0) / (df + 1.0)).ln() + 1.0
    }

    /// Serializes to the line-based text format. Terms are sorted, so the
    /// output only depends on the index contents.
    pub fn to_text(&self) -> String {
        let mut terms: Vec<(&String, &Vec<u32>)> = self.postings.iter().collect();
        terms.sort_unstable_by(|a, b| a.0.cmp(b.0));
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        let _ = writeln!(out, "docs\t{}", self.doc_count);
        let _ = writeln!(out, "terms\t{}", terms.len());
        for (term, ids) in terms {
            out.push_str(term);
            out.push('\t');
            for (i, id) in ids.iter().enumerate() {
                if i > 0 {
                    out.push(' ');
                }
                let _ = write!(out, "{id}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, IndexError> {
        let lines = crate::corpus::split_lines(text);
        if lines.first() != Some(&MAGIC) {
            return Err(parse_err(1, "missing index header"));
        }
        let header = |idx: usize, key: &str| -> Result<usize, IndexError> {
            let line = lines
                .get(idx)
                .ok_or_else(|| parse_err(idx + 1, "truncated header"))?;
            line.strip_prefix(key)
                .and_then(|rest| rest.strip_prefix('\t'))
                .and_then(|v| v.parse().ok())
                .ok_or_else(|| parse_err(idx + 1, format!("expected `{key}<TAB><count>`")))
        };
        let doc_count = header(1, "docs")?;
        let term_count = header(2, "terms")?;
        let body = &lines[3..];
        if body.len() != term_count {
            return Err(parse_err(
                lines.len() + 1,
                format!("expected {term_count} terms, found {}", body.len()),
            ));
        }

        let mut postings = HashMap::with_capacity(term_count);
        let mut prev: Option<&str> = None;
        for (i, line) in body.iter().enumerate() {
            let lineno = i + 4;
            let (term, ids) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(lineno, "expected `<term><TAB><ids>`"))?;
            Token::new(term).map_err(|e| parse_err(lineno, e.to_string()))?;
            if prev.is_some_and(|p| p >= term) {
                return Err(parse_err(lineno, "terms not strictly sorted"));
            }
            prev = Some(term);
            let ids = ids
                .split(' ')
                .map(|x| x.parse::<u32>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| parse_err(lineno, e.to_string()))?;
            if ids.windows(2).any(|w| w[0] >= w[1]) {
                return Err(parse_err(lineno, "posting list not strictly increasing"));
            }
            if ids.last().is_some_and(|&id| id as usize >= doc_count) {
                return Err(parse_err(lineno, "posting id out of range"));
            }
            postings.insert(term.to_owned(), ids);
        }
        Ok(InvertedIndex {
            postings,
            doc_count,
        })
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self, IndexError> {
        Self::from_text(&fs::read_to_string(path)?)
    }
}

impl Retriever for InvertedIndex {
    /// Top-`limit` examples by additive idf, ties broken by ascending id.
    fn search(&self, query: &Sentence, limit: usize) -> Vec<Candidate> {
        if limit == 0 || self.doc_count == 0 {
            return Vec::new();
        }
        let mut seen: HashSet<&str> = HashSet::with_capacity(query.len());
        let mut scores = vec![0.0f64; self.doc_count];
        let mut touched: Vec<u32> = Vec::new();
        for tok in query.iter() {
            if !seen.insert(tok.as_str()) {
                continue;
            }
            let Some(ids) = self.postings.get(tok.as_str()) else {
                continue;
            };
            let idf = self.idf(tok.as_str());
            for &id in ids {
                let slot = &mut scores[id as usize];
                if *slot == 0.0 {
                    touched.push(id);
                }
                *slot += idf;
            }
        }

        let mut out: Vec<Candidate> = touched
            .into_iter()
            .map(|id| Candidate {
                example_id: id as usize,
                lexical_score: scores[id as usize],
            })
            .collect();
        let order = |a: &Candidate, b: &Candidate| {
            b.lexical_score
                .total_cmp(&a.lexical_score)
                .then(a.example_id.cmp(&b.example_id))
        };
        if out.len() > limit {
            out.select_nth_unstable_by(limit - 1, order);
            out.truncate(limit);
        }
        out.sort_unstable_by(order);
        out
    }
}

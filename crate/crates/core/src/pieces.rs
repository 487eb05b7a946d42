//! Translation pieces: target n-grams whose aligned source words all survived
//! the edit path unedited, scored by the best similarity of any retrieved
//! sentence that produced them.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::io;
use std::path::Path;

use crate::corpus::{split_lines, AlignmentLink, Sentence, Token};
use crate::similarity::RetrievedMatch;

/// Longest piece collected, in tokens.
pub const MAX_PIECE_LEN: usize = 4;

/// A target n-gram of 1 to [`MAX_PIECE_LEN`] tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Piece(Vec<Token>);

impl Piece {
    pub fn new(tokens: Vec<Token>) -> Option<Self> {
        (1..=MAX_PIECE_LEN)
            .contains(&tokens.len())
            .then_some(Piece(tokens))
    }

    /// Parses space-joined tokens.
    pub fn parse(text: &str) -> Option<Self> {
        Sentence::parse(text)
            .ok()
            .and_then(|s| Piece::new(s.tokens().to_vec()))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl Borrow<[Token]> for Piece {
    fn borrow(&self) -> &[Token] {
        &self.0
    }
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, tok) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            f.write_str(tok.as_str())?;
        }
        Ok(())
    }
}

/// Target positions that may appear in a piece: every source word they are
/// aligned to must be unedited. Unaligned target words are always allowed.
pub fn collectible_mask(
    target_len: usize,
    source_len: usize,
    alignment: &[AlignmentLink],
    unedited: &[usize],
) -> Vec<bool> {
    let mut kept_source = vec![false; source_len];
    for &p in unedited {
        kept_source[p] = true;
    }
    let mut ok = vec![true; target_len];
    for link in alignment {
        if !kept_source[link.src] {
            ok[link.tgt] = false;
        }
    }
    ok
}

/// Half-open target spans `(start, end)` collected from one match, in the
/// order the nested start/end loops visit them.
pub fn collectible_spans(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut spans = Vec::with_capacity(mask.len() * MAX_PIECE_LEN);
    for start in 0..mask.len() {
        for (len, &ok) in mask[start..].iter().take(MAX_PIECE_LEN).enumerate() {
            if !ok {
                break;
            }
            spans.push((start, start + len + 1));
        }
    }
    spans
}

fn match_spans(m: &RetrievedMatch<'_>) -> Vec<(usize, usize)> {
    let ex = m.example;
    let mask = collectible_mask(ex.target.len(), ex.source.len(), &ex.alignment, &m.unedited);
    collectible_spans(&mask)
}

/// The pieces one retrieved example contributes.
pub fn collect_pieces_single(m: &RetrievedMatch<'_>) -> BTreeSet<Piece> {
    let target = m.example.target.tokens();
    match_spans(m)
        .into_iter()
        .map(|(s, e)| Piece(target[s..e].to_vec()))
        .collect()
}

/// Piece scores for one input sentence plus the list of its unigrams.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PieceTable {
    scores: HashMap<Piece, f64>,
    unigrams: Vec<Token>,
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("line {line}: score {score} outside (0, 1]")]
    ScoreOutOfRange { line: usize, score: f64 },
    #[error("piece {piece:?} present without its sub-span {missing:?}")]
    ClosureViolation { piece: String, missing: String },
}

fn in_score_range(score: f64) -> bool {
    score > 0.0 && score <= 1.0
}

/// Union of all matches' pieces, each scored by the maximum similarity of
/// the matches that produced it. Matches with zero similarity add nothing.
pub fn build_piece_table(matches: &[RetrievedMatch<'_>]) -> PieceTable {
    let mut scores: HashMap<Piece, f64> = HashMap::new();
    for m in matches {
        if m.similarity <= 0.0 {
            continue;
        }
        let target = m.example.target.tokens();
        for (s, e) in match_spans(m) {
            let span = &target[s..e];
            match scores.get_mut(span) {
                Some(best) => *best = best.max(m.similarity),
                None => {
                    scores.insert(Piece(span.to_vec()), m.similarity);
                }
            }
        }
    }
    PieceTable::with_scores(scores)
}

/// Every score replaced by 1.0.
pub fn binarize_table(table: &PieceTable) -> PieceTable {
    PieceTable::with_scores(table.scores.keys().map(|p| (p.clone(), 1.0)).collect())
}

impl PieceTable {
    pub fn empty() -> Self {
        Self::default()
    }

    fn with_scores(scores: HashMap<Piece, f64>) -> Self {
        let mut unigrams: Vec<Token> = scores
            .keys()
            .filter(|p| p.len() == 1)
            .map(|p| p.0[0].clone())
            .collect();
        unigrams.sort_unstable();
        PieceTable { scores, unigrams }
    }

    /// Validates score range and sub-span closure.
    pub fn from_scores(scores: HashMap<Piece, f64>) -> Result<Self, TableError> {
        if let Some((_, &score)) = scores.iter().find(|(_, &s)| !in_score_range(s)) {
            return Err(TableError::ScoreOutOfRange { line: 0, score });
        }
        let table = Self::with_scores(scores);
        table.check_closure()?;
        Ok(table)
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }

    pub fn score(&self, tokens: &[Token]) -> Option<f64> {
        self.scores.get(tokens).copied()
    }

    pub fn contains(&self, tokens: &[Token]) -> bool {
        self.scores.contains_key(tokens)
    }

    /// Distinct single-token pieces, sorted.
    pub fn unigrams(&self) -> &[Token] {
        &self.unigrams
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Piece, f64)> {
        self.scores.iter().map(|(p, &s)| (p, s))
    }

    /// Entries ordered by their rendered text.
    pub fn sorted_entries(&self) -> Vec<(String, f64)> {
        let mut rows: Vec<(String, f64)> = self
            .scores
            .iter()
            .map(|(p, &s)| (p.to_string(), s))
            .collect();
        rows.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        rows
    }

    pub fn check_closure(&self) -> Result<(), TableError> {
        for piece in self.scores.keys() {
            let toks = piece.tokens();
            for len in 1..toks.len() {
                for start in 0..=toks.len() - len {
                    let sub = &toks[start..start + len];
                    if !self.scores.contains_key(sub) {
                        return Err(TableError::ClosureViolation {
                            piece: piece.to_string(),
                            missing: Piece(sub.to_vec()).to_string(),
                        });
                    }
                }
            }
        }
        Ok(())
    }

    /// True when every sub-span scores at least as high as its container.
    pub fn is_monotone(&self) -> bool {
        self.scores.iter().all(|(piece, &score)| {
            let toks = piece.tokens();
            (1..toks.len()).all(|len| {
                (0..=toks.len() - len).all(|s| {
                    self.score(&toks[s..s + len])
                        .is_some_and(|sub| sub >= score)
                })
            })
        })
    }

    /// TSV rows `tokens<TAB>score`, sorted by piece text, six decimals.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (piece, score) in self.sorted_entries() {
            out.push_str(&piece);
            out.push('\t');
            out.push_str(&format!("{score:.6}"));
            out.push('\n');
        }
        out
    }

    pub fn from_tsv(text: &str) -> Result<Self, TableError> {
        let mut scores = HashMap::new();
        for (i, line) in split_lines(text).into_iter().enumerate() {
            let line_no = i + 1;
            let malformed = |message: &str| TableError::Malformed {
                line: line_no,
                message: message.to_string(),
            };
            let (piece, score) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected `piece<TAB>score`"))?;
            let piece = Piece::parse(piece).ok_or_else(|| malformed("invalid piece"))?;
            let score: f64 = score.parse().map_err(|_| malformed("invalid score"))?;
            if !in_score_range(score) {
                return Err(TableError::ScoreOutOfRange {
                    line: line_no,
                    score,
                });
            }
            if scores.insert(piece, score).is_some() {
                return Err(malformed("duplicate piece"));
            }
        }
        let table = Self::with_scores(scores);
        table.check_closure()?;
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_tsv())
    }

    pub fn load(path: &Path) -> Result<Self, TableError> {
        Self::from_tsv(&fs::read_to_string(path)?)
    }
}

//! Tokenized parallel corpora with word alignments.
//!
//! A corpus is three line-synchronized files: `<name>.src`, `<name>.tgt` and
//! `<name>.align`. Sentences are pre-tokenized with single ASCII spaces and
//! alignments use the `i-j` convention (0-based, source position first).

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// A single surface token. Never empty and never contains whitespace.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self, SentenceError> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(SentenceError::InvalidToken(text));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SentenceError {
    #[error("empty sentence")]
    Empty,
    #[error("invalid token {0:?}")]
    InvalidToken(String),
}

/// A non-empty sequence of tokens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sentence(Vec<Token>);

impl Sentence {
    pub fn new(tokens: Vec<Token>) -> Result<Self, SentenceError> {
        if tokens.is_empty() {
            return Err(SentenceError::Empty);
        }
        Ok(Sentence(tokens))
    }

    /// Parses a line of tokens separated by exactly one ASCII space.
    pub fn parse(line: &str) -> Result<Self, SentenceError> {
        if line.is_empty() {
            return Err(SentenceError::Empty);
        }
        let tokens = line
            .split(' ')
            .map(Token::new)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Sentence(tokens))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; kept for clippy's `len_without_is_empty`.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Token> {
        self.0.iter()
    }
}

impl fmt::Display for Sentence {
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

impl AsRef<[Token]> for Sentence {
    fn as_ref(&self) -> &[Token] {
        &self.0
    }
}

impl std::ops::Index<usize> for Sentence {
    type Output = Token;

    fn index(&self, index: usize) -> &Token {
        &self.0[index]
    }
}

/// A source/target word-alignment link, both positions 0-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlignmentLink {
    pub src: usize,
    pub tgt: usize,
}

impl AlignmentLink {
    pub fn new(src: usize, tgt: usize) -> Self {
        AlignmentLink { src, tgt }
    }
}

impl fmt::Display for AlignmentLink {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.src, self.tgt)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error(
    "alignment link {link} out of bounds for source length {src_len} and target length {tgt_len}"
)]
pub struct LinkOutOfBounds {
    pub link: AlignmentLink,
    pub src_len: usize,
    pub tgt_len: usize,
}

/// Parses one Pharaoh-format alignment line. An empty line has no links.
pub fn parse_alignment(line: &str) -> Result<Vec<AlignmentLink>, String> {
    if line.is_empty() {
        return Ok(Vec::new());
    }
    line.split(' ')
        .map(|tok| {
            let (s, t) = tok.split_once('-').ok_or_else(|| tok.to_string())?;
            let parse = |x: &str| {
                if x.is_empty() || !x.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(tok.to_string());
                }
                x.parse::<usize>().map_err(|_| tok.to_string())
            };
            Ok(AlignmentLink::new(parse(s)?, parse(t)?))
        })
        .collect()
}

/// One aligned sentence pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParallelExample {
    pub id: usize,
    pub source: Sentence,
    pub target: Sentence,
    /// Sorted by (src, tgt), no duplicates.
    pub alignment: Vec<AlignmentLink>,
}

impl ParallelExample {
    pub fn new(
        id: usize,
        source: Sentence,
        target: Sentence,
        mut alignment: Vec<AlignmentLink>,
    ) -> Result<Self, LinkOutOfBounds> {
        if let Some(&link) = alignment
            .iter()
            .find(|l| l.src >= source.len() || l.tgt >= target.len())
        {
            return Err(LinkOutOfBounds {
                link,
                src_len: source.len(),
                tgt_len: target.len(),
            });
        }
        alignment.sort_unstable();
        alignment.dedup();
        Ok(ParallelExample {
            id,
            source,
            target,
            alignment,
        })
    }

    /// Renders the alignment as a Pharaoh line.
    pub fn alignment_line(&self) -> String {
        let mut out = String::new();
        for (i, link) in self.alignment.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&link.to_string());
        }
        out
    }
}

/// An ordered, immutable collection of examples with dense ids `0..N`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParallelCorpus {
    examples: Vec<ParallelExample>,
}

impl ParallelCorpus {
    /// Builds a corpus from sentence pairs, assigning ids in order.
    pub fn from_pairs<I>(pairs: I) -> Result<Self, LinkOutOfBounds>
    where
        I: IntoIterator<Item = (Sentence, Sentence, Vec<AlignmentLink>)>,
    {
        let examples = pairs
            .into_iter()
            .enumerate()
            .map(|(id, (s, t, a))| ParallelExample::new(id, s, t, a))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ParallelCorpus { examples })
    }

    fn renumbered(examples: Vec<ParallelExample>) -> Self {
        let examples = examples
            .into_iter()
            .enumerate()
            .map(|(id, mut ex)| {
                ex.id = id;
                ex
            })
            .collect();
        ParallelCorpus { examples }
    }

    pub fn examples(&self) -> &[ParallelExample] {
        &self.examples
    }

    pub fn get(&self, id: usize) -> Option<&ParallelExample> {
        self.examples.get(id)
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ParallelExample> {
        self.examples.iter()
    }

    /// Longest source or target sentence in tokens.
    pub fn max_sentence_len(&self) -> usize {
        self.examples
            .iter()
            .map(|e| e.source.len().max(e.target.len()))
            .max()
            .unwrap_or(0)
    }
}

impl<'a> IntoIterator for &'a ParallelCorpus {
    type Item = &'a ParallelExample;
    type IntoIter = std::slice::Iter<'a, ParallelExample>;

    fn into_iter(self) -> Self::IntoIter {
        self.examples.iter()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error(
        "line {line}: line count mismatch (source {src_lines}, target {tgt_lines}, alignment {align_lines})"
    )]
    LineCountMismatch {
        line: usize,
        src_lines: usize,
        tgt_lines: usize,
        align_lines: usize,
    },
    #[error("line {line}: {side} sentence: {error}")]
    Sentence {
        line: usize,
        side: &'static str,
        error: SentenceError,
    },
    #[error("line {line}: malformed alignment token {token:?}")]
    MalformedLink { line: usize, token: String },
    #[error("line {line}: {error}")]
    OutOfBounds { line: usize, error: LinkOutOfBounds },
}

impl CorpusError {
    /// 1-based line number the error refers to, when there is one.
    pub fn line(&self) -> Option<usize> {
        match self {
            CorpusError::Io { .. } => None,
            CorpusError::LineCountMismatch { line, .. }
            | CorpusError::Sentence { line, .. }
            | CorpusError::MalformedLink { line, .. }
            | CorpusError::OutOfBounds { line, .. } => Some(*line),
        }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String, CorpusError> {
    fs::read_to_string(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Splits on LF only; a trailing LF does not open an extra line.
pub fn split_lines(text: &str) -> Vec<&str> {
    let mut lines: Vec<&str> = text.split('\n').collect();
    if lines.last() == Some(&"") {
        lines.pop();
    }
    lines
}

/// Reads a file of one sentence per line.
pub fn load_sentences(path: &Path) -> Result<Vec<Sentence>, CorpusError> {
    let text = read_text(path)?;
    split_lines(&text)
        .into_iter()
        .enumerate()
        .map(|(i, line)| {
            Sentence::parse(line).map_err(|error| CorpusError::Sentence {
                line: i + 1,
                side: "input",
                error,
            })
        })
        .collect()
}

/// Loads and validates a corpus. Line `k` of each file becomes example `k`.
pub fn load_corpus(
    src_path: &Path,
    tgt_path: &Path,
    align_path: &Path,
) -> Result<ParallelCorpus, CorpusError> {
    let src_text = read_text(src_path)?;
    let tgt_text = read_text(tgt_path)?;
    let align_text = read_text(align_path)?;
    parse_corpus(&src_text, &tgt_text, &align_text)
}

/// `<prefix>.src`, `<prefix>.tgt`, `<prefix>.align`.
pub fn corpus_paths(prefix: &Path) -> (PathBuf, PathBuf, PathBuf) {
    let with = |ext: &str| {
        let mut p = prefix.as_os_str().to_owned();
        p.push(".");
        p.push(ext);
        PathBuf::from(p)
    };
    (with("src"), with("tgt"), with("align"))
}

pub fn load_corpus_prefix(prefix: &Path) -> Result<ParallelCorpus, CorpusError> {
    let (s, t, a) = corpus_paths(prefix);
    load_corpus(&s, &t, &a)
}

/// Parses the contents of the three corpus files.
pub fn parse_corpus(src: &str, tgt: &str, align: &str) -> Result<ParallelCorpus, CorpusError> {
    let src_lines = split_lines(src);
    let tgt_lines = split_lines(tgt);
    let align_lines = split_lines(align);
    if src_lines.len() != tgt_lines.len() || src_lines.len() != align_lines.len() {
        let shortest = src_lines.len().min(tgt_lines.len()).min(align_lines.len());
        return Err(CorpusError::LineCountMismatch {
            line: shortest + 1,
            src_lines: src_lines.len(),
            tgt_lines: tgt_lines.len(),
            align_lines: align_lines.len(),
        });
    }

    let mut examples = Vec::with_capacity(src_lines.len());
    for (i, ((s, t), a)) in src_lines
        .iter()
        .zip(&tgt_lines)
        .zip(&align_lines)
        .enumerate()
    {
        let line = i + 1;
        let source = Sentence::parse(s).map_err(|error| CorpusError::Sentence {
            line,
            side: "source",
            error,
        })?;
        let target = Sentence::parse(t).map_err(|error| CorpusError::Sentence {
            line,
            side: "target",
            error,
        })?;
        let links =
            parse_alignment(a).map_err(|token| CorpusError::MalformedLink { line, token })?;
        let example = ParallelExample::new(i, source, target, links)
            .map_err(|error| CorpusError::OutOfBounds { line, error })?;
        examples.push(example);
    }
    Ok(ParallelCorpus { examples })
}

/// Writes the three corpus files; `load_corpus` reads them back unchanged.
pub fn write_corpus(
    corpus: &ParallelCorpus,
    src_path: &Path,
    tgt_path: &Path,
    align_path: &Path,
) -> io::Result<()> {
    let mut src = BufWriter::new(fs::File::create(src_path)?);
    let mut tgt = BufWriter::new(fs::File::create(tgt_path)?);
    let mut align = BufWriter::new(fs::File::create(align_path)?);
    for ex in corpus {
        writeln!(src, "{}", ex.source)?;
        writeln!(tgt, "{}", ex.target)?;
        writeln!(align, "{}", ex.alignment_line())?;
    }
    src.flush()?;
    tgt.flush()?;
    align.flush()
}

pub fn write_corpus_prefix(corpus: &ParallelCorpus, prefix: &Path) -> io::Result<()> {
    let (s, t, a) = corpus_paths(prefix);
    write_corpus(corpus, &s, &t, &a)
}

/// Keeps the first occurrence of each exact (source, target) pair.
pub fn dedup_corpus(corpus: ParallelCorpus) -> ParallelCorpus {
    let mut seen: HashSet<(Sentence, Sentence)> = HashSet::with_capacity(corpus.len());
    let kept = corpus
        .examples
        .into_iter()
        .filter(|ex| seen.insert((ex.source.clone(), ex.target.clone())))
        .collect();
    ParallelCorpus::renumbered(kept)
}

/// Drops pairs whose source or target is longer than `max_len` tokens.
pub fn length_filter(corpus: ParallelCorpus, max_len: usize) -> ParallelCorpus {
    let kept = corpus
        .examples
        .into_iter()
        .filter(|ex| ex.source.len() <= max_len && ex.target.len() <= max_len)
        .collect();
    ParallelCorpus::renumbered(kept)
}

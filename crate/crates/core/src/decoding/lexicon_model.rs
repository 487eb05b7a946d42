//! A word-for-word synthetic translation model.
//!
//! At step `t` the model puts mass `1 - ε` on the lexicon translation of
//! source token `t` (EOS once the source is exhausted) and spreads `ε`
//! uniformly over a confusion set that always contains that translation.
//! Confusion sets start with the entry's listed alternates and are padded
//! with target tokens drawn from a seeded generator, so the model is fully
//! determined by the lexicon, `ε` and the seed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{split_lines, Sentence, Token};

use super::model::TranslationModel;
use super::vocab::{TokenId, Vocab, EOS_ID};

pub const UNK: &str = "<unk>";
pub const DEFAULT_CONFUSION_SIZE: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub target: String,
    /// Extra candidates always placed in the confusion set.
    pub alternates: Vec<String>,
}

/// Source token → preferred target token.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeMap<String, LexiconEntry>,
}

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

impl Lexicon {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, source: impl Into<String>, target: impl Into<String>) {
        self.insert_with_alternates(source, target, Vec::new());
    }

    pub fn insert_with_alternates(
        &mut self,
        source: impl Into<String>,
        target: impl Into<String>,
        alternates: Vec<String>,
    ) {
        self.entries.insert(
            source.into(),
            LexiconEntry {
                target: target.into(),
                alternates,
            },
        );
    }

    pub fn get(&self, source: &str) -> Option<&LexiconEntry> {
        self.entries.get(source)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &LexiconEntry)> {
        self.entries.iter()
    }

    /// Lines of `source<TAB>target[<TAB>alt alt ...]`, sorted by source.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (src, e) in &self.entries {
            out.push_str(src);
            out.push('\t');
            out.push_str(&e.target);
            if !e.alternates.is_empty() {
                out.push('\t');
                out.push_str(&e.alternates.join(" "));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, LexiconError> {
        let mut lex = Lexicon::new();
        for (i, line) in split_lines(text).into_iter().enumerate() {
            let err = |message: &str| LexiconError::Parse {
                line: i + 1,
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if !(2..=3).contains(&fields.len()) {
                return Err(err("expected `source<TAB>target[<TAB>alternates]`"));
            }
            for f in &fields[..2] {
                Token::new(*f).map_err(|e| err(&e.to_string()))?;
            }
            let alternates = match fields.get(2) {
                Some(alts) => Sentence::parse(alts)
                    .map_err(|e| err(&e.to_string()))?
                    .iter()
                    .map(|t| t.as_str().to_string())
                    .collect(),
                None => Vec::new(),
            };
            lex.insert_with_alternates(fields[0], fields[1], alternates);
        }
        Ok(lex)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        Self::from_text(&fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.to_text())
    }
}

#[derive(Debug, Clone)]
struct Emission {
    target: TokenId,
    confusions: Vec<TokenId>,
}

#[derive(Debug, Clone)]
pub struct LexiconModel {
    vocab: Vocab,
    by_source: HashMap<String, Emission>,
    unknown: Emission,
    end: Emission,
    noise_eps: f64,
}

pub fn make_lexicon_model(lexicon: &Lexicon, noise_eps: f64, seed: u64) -> LexiconModel {
    LexiconModel::new(lexicon, noise_eps, seed, DEFAULT_CONFUSION_SIZE)
}

impl LexiconModel {
    /// # Panics
    /// If `noise_eps` is outside `[0, 1)`.
    pub fn new(lexicon: &Lexicon, noise_eps: f64, seed: u64, confusion_size: usize) -> Self {
        assert!(
            (0.0..1.0).contains(&noise_eps),
            "noise_eps must lie in [0, 1), got {noise_eps}"
        );
        let mut words: BTreeSet<&str> = BTreeSet::new();
        for (_, e) in lexicon.iter() {
            words.insert(&e.target);
            words.extend(e.alternates.iter().map(String::as_str));
        }
        let vocab = Vocab::new(std::iter::once(UNK).chain(words));
        let unk = vocab.id(UNK).expect("unk in vocab");
        let first_word = unk; // ids below are BOS and EOS
        let mut rng = ChaCha8Rng::seed_from_u64(seed);

        let mut emission = |target: TokenId, alternates: &[TokenId]| {
            let mut set = vec![target];
            for &a in alternates {
                if !set.contains(&a) {
                    set.push(a);
                }
            }
            let available = vocab.len() - first_word as usize + usize::from(target == EOS_ID);
            while set.len() < confusion_size.min(available) {
                let pick = rng.random_range(first_word..vocab.len() as TokenId);
                if !set.contains(&pick) {
                    set.push(pick);
                }
            }
            Emission {
                target,
                confusions: set,
            }
        };

        let mut by_source = HashMap::with_capacity(lexicon.len());
        for (src, e) in lexicon.iter() {
            let target = vocab.id(&e.target).expect("target in vocab");
            let alts: Vec<TokenId> = e
                .alternates
                .iter()
                .map(|a| vocab.id(a).expect("alternate in vocab"))
                .collect();
            by_source.insert(src.clone(), emission(target, &alts));
        }
        let unknown = emission(unk, &[]);
        let end = emission(EOS_ID, &[]);
        LexiconModel {
            vocab,
            by_source,
            unknown,
            end,
            noise_eps,
        }
    }

    pub fn noise_eps(&self) -> f64 {
        self.noise_eps
    }

    fn emission(&self, source: &Sentence, step: usize) -> &Emission {
        match source.tokens().get(step) {
            Some(tok) => self.by_source.get(tok.as_str()).unwrap_or(&self.unknown),
            None => &self.end,
        }
    }

    /// The confusion set used at `step` (always contains the translation).
    pub fn confusion_set(&self, source: &Sentence, step: usize) -> &[TokenId] {
        &self.emission(source, step).confusions
    }

    /// The noiseless translation at `step`.
    pub fn translation_at(&self, source: &Sentence, step: usize) -> TokenId {
        self.emission(source, step).target
    }
}

impl TranslationModel for LexiconModel {
    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn next_log_distribution(&self, source: &Sentence, prefix: &[TokenId]) -> Vec<f64> {
        let e = self.emission(source, prefix.len());
        let mut probs = vec![0.0f64; self.vocab.len()];
        probs[e.target as usize] += 1.0 - self.noise_eps;
        let share = self.noise_eps / e.confusions.len() as f64;
        for &c in &e.confusions {
            probs[c as usize] += share;
        }
        probs.into_iter().map(f64::ln).collect()
    }
}

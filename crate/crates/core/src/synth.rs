//! Seeded generator for narrow-domain parallel corpora.
//!
//! Sentences come from templated families whose frequencies follow a Zipf
//! law. A template mixes fixed words, optional words and filler slots drawn
//! from small word classes. Some source words are ambiguous: each family
//! fixes one sense for them, while the generated lexicon only knows the
//! general sense 0. Frequent families mostly use the general sense, rare
//! ones mostly a specific one. An ambiguous word is always preceded by the
//! same head words, so the local context alone does not reveal its sense.
//! How variable a family is does not depend on how frequent it is. Source
//! and target are aligned one-to-one and monotonically.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{AlignmentLink, ParallelCorpus, Sentence, Token};
use crate::decoding::Lexicon;

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    pub seed: u64,
    pub train_size: usize,
    pub test_size: usize,
    pub families: usize,
    /// Zipf exponent over family ranks.
    pub family_zipf: f64,
    /// Plain content words.
    pub content_words: usize,
    /// Zipf exponent over content words when filling fixed slots.
    pub word_zipf: f64,
    pub ambiguous_words: usize,
    pub senses: usize,
    /// Ambiguous slots per template.
    pub ambiguous_per_template: usize,
    /// Number of head words fixed before every ambiguous word.
    pub head_len: usize,
    /// Head words are drawn from this many most frequent content words.
    pub head_pool: usize,
    pub filler_classes: usize,
    pub filler_class_size: usize,
    pub min_len: usize,
    pub max_len: usize,
    /// Each family draws its filler-slot probability uniformly from
    /// `[0, max_filler_rate]`.
    pub max_filler_rate: f64,
    /// Each family draws its optional-slot probability uniformly from
    /// `[0, max_optional_rate]`.
    pub max_optional_rate: f64,
    /// A family of rank `r` (1-based) picks a specific sense with
    /// probability `specific_sense_rate · r / (r + sense_shift)`.
    pub specific_sense_rate: f64,
    pub sense_shift: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            seed: 13,
            train_size: 5000,
            test_size: 500,
            families: 3000,
            family_zipf: 0.8,
            content_words: 2000,
            word_zipf: 1.0,
            ambiguous_words: 1000,
            senses: 5,
            ambiguous_per_template: 2,
            head_len: 3,
            head_pool: 20,
            filler_classes: 12,
            filler_class_size: 25,
            min_len: 8,
            max_len: 20,
            max_filler_rate: 1.0,
            max_optional_rate: 0.6,
            specific_sense_rate: 0.9,
            sense_shift: 30.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Slot {
    Fixed(usize),
    Optional(usize),
    Ambiguous { word: usize, sense: usize },
    Filler(usize),
}

#[derive(Debug, Clone)]
struct Template {
    slots: Vec<Slot>,
}

#[derive(Debug, Clone)]
pub struct SynthData {
    pub train: ParallelCorpus,
    pub test_source: Vec<Sentence>,
    pub test_reference: Vec<Sentence>,
    /// Family of every test sentence, for diagnostics.
    pub test_families: Vec<usize>,
    pub lexicon: Lexicon,
}

fn content_source(i: usize) -> String {
    format!("s{i}")
}

fn content_target(i: usize) -> String {
    format!("t{i}")
}

fn ambiguous_source(i: usize) -> String {
    format!("a{i}")
}

fn ambiguous_target(i: usize, sense: usize) -> String {
    format!("b{i}.{sense}")
}

fn filler_source(class: usize, k: usize) -> String {
    format!("f{class}.{k}")
}

fn filler_target(class: usize, k: usize) -> String {
    format!("g{class}.{k}")
}

fn zipf(n: usize, exponent: f64) -> WeightedIndex<f64> {
    WeightedIndex::new((1..=n).map(|r| (r as f64).powf(-exponent))).expect("non-empty support")
}

fn sentence(words: Vec<String>) -> Sentence {
    Sentence::new(
        words
            .into_iter()
            .map(|w| Token::new(w).expect("generated token"))
            .collect(),
    )
    .expect("non-empty sentence")
}

struct Generator<'c> {
    config: &'c SynthConfig,
    templates: Vec<Template>,
    families: WeightedIndex<f64>,
}

impl Generator<'_> {
    fn instantiate(&self, family: usize, rng: &mut ChaCha8Rng) -> (Vec<String>, Vec<String>) {
        let c = self.config;
        let mut src = Vec::new();
        let mut tgt = Vec::new();
        for slot in &self.templates[family].slots {
            match *slot {
                Slot::Fixed(w) => {
                    src.push(content_source(w));
                    tgt.push(content_target(w));
                }
                Slot::Optional(w) => {
                    if rng.random_bool(0.5) {
                        src.push(content_source(w));
                        tgt.push(content_target(w));
                    }
                }
                Slot::Ambiguous { word, sense } => {
                    src.push(ambiguous_source(word));
                    tgt.push(ambiguous_target(word, sense));
                }
                Slot::Filler(class) => {
                    let k = rng.random_range(0..c.filler_class_size);
                    src.push(filler_source(class, k));
                    tgt.push(filler_target(class, k));
                }
            }
        }
        (src, tgt)
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> (usize, Vec<String>, Vec<String>) {
        let family = self.families.sample(rng);
        let (s, t) = self.instantiate(family, rng);
        (family, s, t)
    }
}

fn build_templates(c: &SynthConfig, rng: &mut ChaCha8Rng) -> Vec<Template> {
    let words = zipf(c.content_words, c.word_zipf);
    let pool = c.head_pool.clamp(1, c.content_words);
    let heads: Vec<Vec<usize>> = (0..c.ambiguous_words)
        .map(|_| (0..c.head_len).map(|_| rng.random_range(0..pool)).collect())
        .collect();
    (0..c.families)
        .map(|f| {
            let len = rng.random_range(c.min_len..=c.max_len);
            let filler_rate = rng.random_range(0.0..=c.max_filler_rate);
            let optional_rate = rng.random_range(0.0..=c.max_optional_rate);
            let rank = (f + 1) as f64;
            let specific = c.specific_sense_rate * rank / (rank + c.sense_shift);
            let mut slots: Vec<Slot> = (0..len)
                .map(|_| {
                    if c.filler_classes > 0 && rng.random_bool(filler_rate) {
                        Slot::Filler(rng.random_range(0..c.filler_classes))
                    } else {
                        let w = words.sample(rng);
                        if rng.random_bool(optional_rate) {
                            Slot::Optional(w)
                        } else {
                            Slot::Fixed(w)
                        }
                    }
                })
                .collect();
            if c.ambiguous_words > 0 && len > c.head_len {
                for _ in 0..c.ambiguous_per_template.min(len / (c.head_len + 1)) {
                    let pos = rng.random_range(c.head_len..len);
                    let word = rng.random_range(0..c.ambiguous_words);
                    for (k, &h) in heads[word].iter().enumerate() {
                        slots[pos - c.head_len + k] = Slot::Fixed(h);
                    }
                    let sense = if c.senses > 1 && rng.random_bool(specific.clamp(0.0, 1.0)) {
                        rng.random_range(1..c.senses)
                    } else {
                        0
                    };
                    slots[pos] = Slot::Ambiguous { word, sense };
                }
            }
            Template { slots }
        })
        .collect()
}

/// Word-for-word lexicon; ambiguous words map to sense 0 and list the other
/// senses as alternates.
pub fn build_lexicon(config: &SynthConfig) -> Lexicon {
    let c = config;
    let mut lex = Lexicon::new();
    for w in 0..c.content_words {
        lex.insert(content_source(w), content_target(w));
    }
    for class in 0..c.filler_classes {
        for k in 0..c.filler_class_size {
            lex.insert(filler_source(class, k), filler_target(class, k));
        }
    }
    for w in 0..c.ambiguous_words {
        let alternates = (1..c.senses.max(1))
            .map(|s| ambiguous_target(w, s))
            .collect();
        lex.insert_with_alternates(ambiguous_source(w), ambiguous_target(w, 0), alternates);
    }
    lex
}

pub fn generate(config: &SynthConfig) -> SynthData {
    assert!(
        config.min_len >= 1 && config.min_len <= config.max_len,
        "invalid length range"
    );
    assert!(
        config.families > 0 && config.content_words > 0,
        "empty inventory"
    );
    assert!(
        (0.0..=1.0).contains(&config.max_filler_rate)
            && (0.0..=1.0).contains(&config.max_optional_rate),
        "slot rates must be probabilities"
    );
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let generator = Generator {
        config,
        templates: build_templates(config, &mut rng),
        families: zipf(config.families, config.family_zipf),
    };
    let pairs: Vec<(Sentence, Sentence, Vec<AlignmentLink>)> = (0..config.train_size)
        .map(|_| {
            let (_, s, t) = generator.sample(&mut rng);
            let links = (0..s.len())
                .map(|i| AlignmentLink { src: i, tgt: i })
                .collect();
            (sentence(s), sentence(t), links)
        })
        .collect();
    let train = ParallelCorpus::from_pairs(pairs).expect("monotone links are in bounds");
    let mut test_source = Vec::with_capacity(config.test_size);
    let mut test_reference = Vec::with_capacity(config.test_size);
    let mut test_families = Vec::with_capacity(config.test_size);
    for _ in 0..config.test_size {
        let (f, s, t) = generator.sample(&mut rng);
        test_source.push(sentence(s));
        test_reference.push(sentence(t));
        test_families.push(f);
    }
    let lexicon = build_lexicon(config);
    SynthData {
        train,
        test_source,
        test_reference,
        test_families,
        lexicon,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SynthConfig {
        SynthConfig {
            train_size: 200,
            test_size: 20,
            families: 30,
            content_words: 100,
            ..SynthConfig::default()
        }
    }

    #[test]
    fn deterministic() {
        let a = generate(&small());
        let b = generate(&small());
        assert_eq!(a.train, b.train);
        assert_eq!(a.test_source, b.test_source);
        assert_eq!(a.lexicon, b.lexicon);
    }

    #[test]
    fn shapes() {
        let d = generate(&small());
        assert_eq!(d.train.len(), 200);
        assert_eq!(d.test_source.len(), 20);
        for ex in &d.train {
            assert_eq!(ex.source.len(), ex.target.len());
            assert_eq!(ex.alignment.len(), ex.source.len());
        }
        for (s, r) in d.test_source.iter().zip(&d.test_reference) {
            assert_eq!(s.len(), r.len());
        }
    }

    #[test]
    fn lexicon_covers_test_vocabulary() {
        let d = generate(&small());
        for s in &d.test_source {
            for t in s.iter() {
                assert!(d.lexicon.get(t.as_str()).is_some(), "{t}");
            }
        }
        let e = d.lexicon.get("a0").unwrap();
        assert_eq!(e.target, "b0.0");
        assert_eq!(e.alternates.len(), 4);
    }
}

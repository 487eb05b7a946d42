//! A model that returns explicitly listed distributions.
//!
//! Listing files have one record per line:
//!
//! ```text
//! <source>\t<prefix>\t<token>:<prob>,<token>:<prob>,...
//! ```
//!
//! `<source>` is the space-joined source sentence or `*` for any source.
//! `<prefix>` is `<s>` followed by the generated tokens (`<s> a b`), or `*`
//! together with a `*` source for the fallback record, which is required.
//! Unlisted tokens get probability zero.

use std::collections::{BTreeSet, HashMap};

use crate::corpus::{split_lines, Sentence};

use super::model::TranslationModel;
use super::vocab::{TokenId, Vocab, BOS, EOS};

/// Listed probabilities must sum to one within this tolerance.
pub const LISTING_TOLERANCE: f64 = 1e-9;

/// One explicit context and its next-token distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct Listing {
    /// `None` matches every source sentence.
    pub source: Option<String>,
    /// Generated tokens after BOS.
    pub prefix: Vec<String>,
    pub probs: Vec<(String, f64)>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ModelError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("listing {index}: probabilities sum to {sum}, not 1")]
    NotNormalized { index: usize, sum: f64 },
    #[error("listing {index}: invalid probability for {token:?}")]
    InvalidProbability { index: usize, token: String },
    #[error("no fallback distribution")]
    MissingFallback,
}

#[derive(Debug, Clone)]
pub struct TableModel {
    vocab: Vocab,
    entries: HashMap<(Option<String>, Vec<TokenId>), Vec<f64>>,
    fallback: Vec<f64>,
}

fn check_probs(index: usize, probs: &[(String, f64)]) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for (tok, p) in probs {
        if !p.is_finite() || *p < 0.0 || !seen.insert(tok.as_str()) || tok == BOS {
            return Err(ModelError::InvalidProbability {
                index,
                token: tok.clone(),
            });
        }
    }
    let sum: f64 = probs.iter().map(|(_, p)| p).sum();
    if (sum - 1.0).abs() > LISTING_TOLERANCE {
        return Err(ModelError::NotNormalized { index, sum });
    }
    Ok(())
}

/// Builds a model from explicit listings plus a fallback distribution.
/// The vocabulary is BOS, EOS and every other listed token in sorted order.
pub fn make_table_model(
    listings: Vec<Listing>,
    fallback: Vec<(String, f64)>,
) -> Result<TableModel, ModelError> {
    for (i, l) in listings.iter().enumerate() {
        check_probs(i, &l.probs)?;
    }
    check_probs(listings.len(), &fallback)?;

    let mut words: BTreeSet<&str> = BTreeSet::new();
    for l in &listings {
        words.extend(l.prefix.iter().map(String::as_str));
        words.extend(l.probs.iter().map(|(t, _)| t.as_str()));
    }
    words.extend(fallback.iter().map(|(t, _)| t.as_str()));
    let vocab = Vocab::new(words.into_iter().filter(|w| *w != BOS && *w != EOS));

    let dense = |probs: &[(String, f64)]| {
        let mut out = vec![f64::NEG_INFINITY; vocab.len()];
        for (tok, p) in probs {
            out[vocab.id(tok).expect("listed token in vocab") as usize] = p.ln();
        }
        out
    };
    let mut entries = HashMap::with_capacity(listings.len());
    for l in &listings {
        let prefix: Vec<TokenId> = l
            .prefix
            .iter()
            .map(|t| vocab.id(t).expect("prefix token in vocab"))
            .collect();
        entries.insert((l.source.clone(), prefix), dense(&l.probs));
    }
    let fallback = dense(&fallback);
    Ok(TableModel {
        vocab,
        entries,
        fallback,
    })
}

fn parse_probs(field: &str, line: usize) -> Result<Vec<(String, f64)>, ModelError> {
    let err = |message: String| ModelError::Parse { line, message };
    let mut out = Vec::new();
    let mut pending: Option<String> = None;
    // Tokens may themselves contain ',' or ':'; grow the entry until it ends
    // in `:<number>` with a non-empty token.
    for frag in field.split(',') {
        let entry = match pending.take() {
            Some(mut p) => {
                p.push(',');
                p.push_str(frag);
                p
            }
            None => frag.to_string(),
        };
        let parsed = entry
            .rsplit_once(':')
            .filter(|(tok, _)| !tok.is_empty())
            .and_then(|(tok, p)| p.parse::<f64>().ok().map(|p| (tok.to_string(), p)));
        match parsed {
            Some(pair) => out.push(pair),
            None => pending = Some(entry),
        }
    }
    if pending.is_some() || out.is_empty() {
        return Err(err(format!("malformed distribution {field:?}")));
    }
    Ok(out)
}

/// Parses a listing file (see the module docs).
pub fn parse_table_model(text: &str) -> Result<TableModel, ModelError> {
    let mut listings = Vec::new();
    let mut fallback = None;
    for (i, line) in split_lines(text).into_iter().enumerate() {
        let line_no = i + 1;
        let err = |message: &str| ModelError::Parse {
            line: line_no,
            message: message.to_string(),
        };
        let mut fields = line.split('\t');
        let (Some(src), Some(prefix), Some(dist), None) =
            (fields.next(), fields.next(), fields.next(), fields.next())
        else {
            return Err(err("expected three tab-separated fields"));
        };
        let probs = parse_probs(dist, line_no)?;
        if prefix == "*" {
            if src != "*" {
                return Err(err("a `*` prefix requires a `*` source"));
            }
            if fallback.replace(probs).is_some() {
                return Err(err("duplicate fallback"));
            }
            continue;
        }
        let prefix_tokens = prefix
            .strip_prefix(BOS)
            .filter(|rest| rest.is_empty() || rest.starts_with(' '))
            .ok_or_else(|| err("prefix must start with <s>"))?;
        let prefix: Vec<String> = prefix_tokens
            .split(' ')
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        let source = if src == "*" {
            None
        } else {
            Some(
                Sentence::parse(src)
                    .map_err(|e| err(&e.to_string()))?
                    .to_string(),
            )
        };
        listings.push(Listing {
            source,
            prefix,
            probs,
        });
    }
    let fallback = fallback.ok_or(ModelError::MissingFallback)?;
    make_table_model(listings, fallback)
}

impl TableModel {
    fn lookup(&self, source: &Sentence, prefix: &[TokenId]) -> &[f64] {
        let key_src = Some(source.to_string());
        let prefix = prefix.to_vec();
        let exact = (key_src, prefix);
        if let Some(d) = self.entries.get(&exact) {
            return d;
        }
        let any = (None, exact.1);
        self.entries.get(&any).unwrap_or(&self.fallback)
    }
}

impl TranslationModel for TableModel {
    fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    fn next_log_distribution(&self, source: &Sentence, prefix: &[TokenId]) -> Vec<f64> {
        self.lookup(source, prefix).to_vec()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn listed_and_fallback_contexts() {
        let m =
            parse_table_model("a\t<s>\tx:0.25,y:0.75\n*\t<s> x\t</s>:1\n*\t*\t</s>:0.5,z:0.5\n")
                .unwrap();
        let v = m.vocab();
        let src = Sentence::parse("a").unwrap();
        let d = m.next_log_distribution(&src, &[]);
        assert_eq!(d[v.id("x").unwrap() as usize], 0.25f64.ln());
        assert_eq!(d[v.id("y").unwrap() as usize], 0.75f64.ln());
        assert_eq!(d[v.id("z").unwrap() as usize], f64::NEG_INFINITY);
        let d = m.next_log_distribution(&src, &[v.id("x").unwrap()]);
        assert_eq!(d[1], 0.0);
        // unlisted source at <s> falls back
        let d = m.next_log_distribution(&Sentence::parse("b").unwrap(), &[]);
        assert_eq!(d[v.id("z").unwrap() as usize], 0.5f64.ln());
    }

    #[test]
    fn tokens_with_separators() {
        let probs = parse_probs(",:0.5,a:b:0.25,::0.25", 1).unwrap();
        assert_eq!(
            probs,
            vec![(",".into(), 0.5), ("a:b".into(), 0.25), (":".into(), 0.25)]
        );
    }

    #[test]
    fn rejects_bad_listings() {
        assert!(matches!(
            parse_table_model("*\t<s>\ta:0.5\n*\t*\ta:1\n"),
            Err(ModelError::NotNormalized { .. })
        ));
        assert!(matches!(
            parse_table_model("*\t<s>\ta:1\n"),
            Err(ModelError::MissingFallback)
        ));
        assert!(parse_table_model("*\tx\ta:1\n*\t*\ta:1\n").is_err());
        assert!(parse_table_model("*\t<s>\ta:1,a:0\n*\t*\ta:1\n").is_err());
        assert!(parse_table_model("*\t<s>\ta:-0.5,b:1.5\n*\t*\ta:1\n").is_err());
    }
}

use std::fs;
use std::path::Path;

use transpiece::corpus::Sentence;
use transpiece::decoding::{
    make_lexicon_model, parse_table_model, Lexicon, LexiconModel, TableModel, TokenId,
    TranslationModel, Vocab,
};

use crate::error::CliError;

pub enum LoadedModel {
    Table(TableModel),
    Lexicon(LexiconModel),
}

impl TranslationModel for LoadedModel {
    fn vocab(&self) -> &Vocab {
        match self {
            LoadedModel::Table(m) => m.vocab(),
            LoadedModel::Lexicon(m) => m.vocab(),
        }
    }

    fn next_log_distribution(&self, source: &Sentence, prefix: &[TokenId]) -> Vec<f64> {
        match self {
            LoadedModel::Table(m) => m.next_log_distribution(source, prefix),
            LoadedModel::Lexicon(m) => m.next_log_distribution(source, prefix),
        }
    }
}

/// Parses `table:PATH` or `lexicon:PATH`.
pub fn load_model(spec: &str, noise_eps: f64, seed: u64) -> Result<LoadedModel, CliError> {
    let (kind, path) = spec
        .split_once(':')
        .ok_or_else(|| CliError::input(format!("model spec {spec:?} is not KIND:PATH")))?;
    let path = Path::new(path);
    match kind {
        "table" => {
            let text = fs::read_to_string(path).map_err(|e| CliError::read(path, e))?;
            Ok(LoadedModel::Table(parse_table_model(&text)?))
        }
        "lexicon" => {
            if !(0.0..1.0).contains(&noise_eps) {
                return Err(CliError::input(format!(
                    "--noise-eps must lie in [0, 1), got {noise_eps}"
                )));
            }
            let lexicon = Lexicon::load(path).map_err(|e| CliError::read(path, e))?;
            Ok(LoadedModel::Lexicon(make_lexicon_model(
                &lexicon, noise_eps, seed,
            )))
        }
        other => Err(CliError::input(format!(
            "unknown model kind {other:?}; expected `table` or `lexicon`"
        ))),
    }
}

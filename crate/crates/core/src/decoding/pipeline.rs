//! Retrieval → matching → piece table → guided beam search.

use crate::corpus::{ParallelCorpus, Sentence};
use crate::par::{self, Execution};
use crate::pieces::{binarize_table, build_piece_table, PieceTable};
use crate::retrieval::Retriever;
use crate::similarity::{compute_match, RetrievedMatch};

use super::beam::{beam_search, DecodeResult, Hypothesis};
use super::model::TranslationModel;
use super::{DecodeConfig, DecodeError};

/// How piece scores are turned into rewards.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum RewardMode {
    /// Score = best similarity of a retrieved sentence producing the piece.
    #[default]
    Similarity,
    /// Every collected piece scores 1.
    Binary,
}

/// The top-`m` retrieved examples scored against `x`, in retrieval order.
pub fn retrieve_matches<'a, R: Retriever + ?Sized>(
    corpus: &'a ParallelCorpus,
    retriever: &R,
    x: &Sentence,
    m: usize,
) -> Vec<RetrievedMatch<'a>> {
    retriever
        .search(x, m)
        .into_iter()
        .filter_map(|c| corpus.get(c.example_id))
        .map(|ex| compute_match(x, ex))
        .collect()
}

/// Piece table for `x` from its top-`m` retrieved examples.
pub fn retrieve_piece_table<R: Retriever + ?Sized>(
    corpus: &ParallelCorpus,
    retriever: &R,
    x: &Sentence,
    m: usize,
    mode: RewardMode,
) -> PieceTable {
    let table = build_piece_table(&retrieve_matches(corpus, retriever, x, m));
    match mode {
        RewardMode::Similarity => table,
        RewardMode::Binary => binarize_table(&table),
    }
}

pub struct Pipeline<'a, R: ?Sized, M: ?Sized> {
    pub corpus: &'a ParallelCorpus,
    pub retriever: &'a R,
    pub model: &'a M,
}

impl<R: ?Sized, M: ?Sized> Clone for Pipeline<'_, R, M> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<R: ?Sized, M: ?Sized> Copy for Pipeline<'_, R, M> {}

impl<'a, R, M> Pipeline<'a, R, M>
where
    R: Retriever + ?Sized,
    M: TranslationModel + ?Sized,
{
    pub fn new(corpus: &'a ParallelCorpus, retriever: &'a R, model: &'a M) -> Self {
        Pipeline {
            corpus,
            retriever,
            model,
        }
    }

    pub fn matches(&self, x: &Sentence, m: usize) -> Vec<RetrievedMatch<'a>> {
        retrieve_matches(self.corpus, self.retriever, x, m)
    }

    pub fn piece_table(&self, x: &Sentence, m: usize, mode: RewardMode) -> PieceTable {
        retrieve_piece_table(self.corpus, self.retriever, x, m, mode)
    }

    pub fn translate(
        &self,
        x: &Sentence,
        m: usize,
        config: &DecodeConfig,
        mode: RewardMode,
    ) -> Result<DecodeResult, DecodeError> {
        let table = self.piece_table(x, m, mode);
        beam_search(self.model, x, &table, config)
    }

    /// Unguided decoding: an empty piece table.
    pub fn baseline(
        &self,
        x: &Sentence,
        config: &DecodeConfig,
    ) -> Result<DecodeResult, DecodeError> {
        beam_search(self.model, x, &PieceTable::empty(), config)
    }
}

impl<'a, R, M> Pipeline<'a, R, M>
where
    R: Retriever + Sync + ?Sized,
    M: TranslationModel + Sync + ?Sized,
{
    pub fn piece_tables(
        &self,
        inputs: &[Sentence],
        m: usize,
        mode: RewardMode,
        exec: Execution,
    ) -> Vec<PieceTable> {
        par::map(inputs, exec, |x| self.piece_table(x, m, mode))
    }

    /// Translates every input; results are in input order.
    pub fn translate_batch(
        &self,
        inputs: &[Sentence],
        m: usize,
        config: &DecodeConfig,
        mode: RewardMode,
        exec: Execution,
    ) -> Result<Vec<DecodeResult>, DecodeError> {
        par::try_map(inputs, exec, |x| self.translate(x, m, config, mode))
    }

    pub fn baseline_batch(
        &self,
        inputs: &[Sentence],
        config: &DecodeConfig,
        exec: Execution,
    ) -> Result<Vec<DecodeResult>, DecodeError> {
        par::try_map(inputs, exec, |x| self.baseline(x, config))
    }
}

/// Retrieves `m` examples for `x`, builds its piece table and decodes.
pub fn guided_translate<R, M>(
    pipeline: &Pipeline<'_, R, M>,
    x: &Sentence,
    m: usize,
    config: &DecodeConfig,
) -> Result<Hypothesis, DecodeError>
where
    R: Retriever + ?Sized,
    M: TranslationModel + ?Sized,
{
    let mut result = pipeline.translate(x, m, config, RewardMode::Similarity)?;
    Ok(result.nbest.swap_remove(0))
}

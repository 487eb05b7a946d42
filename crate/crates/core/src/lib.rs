//! Translation-memory guided decoding.
//!
//! For an input sentence, similar sentence pairs are retrieved from a
//! parallel corpus, target n-grams whose source side survives the word-level
//! edit path are collected as scored translation pieces, and those pieces
//! reward matching n-grams while a translation model is beam searched.

pub mod corpus;
pub mod decoding;
pub mod evaluation;
pub mod par;
pub mod pieces;
pub mod retrieval;
pub mod similarity;
pub mod synth;

pub use corpus::{AlignmentLink, ParallelCorpus, ParallelExample, Sentence, Token};
pub use decoding::{DecodeConfig, Hypothesis, Pipeline, TranslationModel};
pub use par::Execution;
pub use pieces::{Piece, PieceTable};
pub use retrieval::{build_index, InvertedIndex, Retriever};

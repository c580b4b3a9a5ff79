//! Subword vocabulary induction, greedy longest-match segmentation, and
//! pair encoding with word-to-subtoken label projection.

mod encode;
mod vocab;

use std::path::PathBuf;

pub use encode::{encode_pair, encode_pairs, project_labels, EncodeOptions, EncodedSequence};
pub use vocab::{
    build_vocab, tokenize_word, Vocab, CLS, CONTINUATION_PREFIX, PAD, SEP, SPECIAL_TOKENS, UNK,
};

/// Label value for positions that carry no target.
pub const IGNORE_LABEL: i32 = -100;

#[derive(Debug, thiserror::Error)]
pub enum TokenizerError {
    #[error("cannot build a vocabulary from an empty corpus")]
    EmptyCorpus,
    #[error("target vocabulary size {0} leaves no room beside the 4 special tokens")]
    TargetTooSmall(usize),
    #[error("max_len {0} is below the minimum of 8")]
    MaxLenTooSmall(usize),
    #[error("pair {0} has no content tokens left after truncation")]
    EmptyEncoding(String),
    #[error("word index {index} out of range for {len} word labels")]
    LabelIndex { index: usize, len: usize },
    #[error("objective {0} has no word labels for this pair")]
    MissingLabels(String),
    #[error("vocabulary file {path}: {reason}")]
    VocabFile { path: PathBuf, reason: String },
}

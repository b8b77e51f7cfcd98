//! Character-level BPE training with Zipf-alignment analysis.
//!
//! * [`corpus`] turns raw text into pre-token counts.
//! * [`bpe`] trains merge rules incrementally and encodes/decodes with a
//!   frozen [`Vocabulary`].
//! * [`zipf`] fits a power law to the token rank-frequency curve and
//!   computes compression ratio and fertility.
//! * [`selector`] grows a vocabulary until its Zipf score stops improving.

pub mod bpe;
pub mod corpus;
pub mod error;
pub mod plot;
pub mod selector;
pub mod synth;
pub mod zipf;

pub use bpe::{train_to_size, MergeRule, Trainer, Vocabulary};
pub use corpus::{load_corpus, Alphabet, CorpusMode, Normalization, PretokenCounts};
pub use error::{Error, Result};
pub use selector::{
    replay_trace, select_vocabulary, select_vocabulary_with, CheckpointRecord, PickRule,
    SelectionResult, SelectorConfig, StopReason, VocabFloor,
};
pub use zipf::{
    compression_ratio, fertility, fit_power_law, rank_frequency, zipf_score, RankFrequencyCurve,
    TokenFrequencyTable, ZipfFit,
};

/// Glyph fused onto the last symbol of every text-mode word.
pub const END_OF_WORD: char = '\u{2581}';

/// Token standing in for characters outside the alphabet.
pub const UNK: char = '\u{fffd}';

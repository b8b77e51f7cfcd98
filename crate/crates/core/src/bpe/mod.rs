//! Byte-pair-encoding training and inference over characters.
//!
//! In text mode the last character of every word is fused with the
//! end-of-word glyph (`'a','b'` becomes `["a", "b▁"]`), so no merge can
//! straddle a word boundary and decoding can restore the spaces. Sequence
//! mode splits records into bare characters.

mod encode;
mod trainer;
mod vocab;

use serde::{Deserialize, Serialize};

pub use trainer::{MergeCandidate, Trainer};
pub use vocab::{train_to_size, TrainOutput, Vocabulary, FORMAT_VERSION};

use crate::corpus::CorpusMode;
use crate::{END_OF_WORD, UNK};

/// Ordered rewrite `left · right -> merged`; `rank` is its creation index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MergeRule {
    pub left: String,
    pub right: String,
    pub merged: String,
    pub rank: usize,
}

impl MergeRule {
    pub fn new(left: impl Into<String>, right: impl Into<String>, rank: usize) -> Self {
        let left = left.into();
        let right = right.into();
        let merged = format!("{left}{right}");
        MergeRule {
            left,
            right,
            merged,
            rank,
        }
    }
}

/// Reserved tokens for a mode, in id order.
pub fn reserved_tokens(mode: CorpusMode) -> Vec<String> {
    match mode {
        CorpusMode::Text => vec![UNK.to_string(), END_OF_WORD.to_string()],
        CorpusMode::Sequence => vec![UNK.to_string()],
    }
}

/// Symbol carrying the word-final marker.
pub fn word_final(c: char) -> String {
    let mut s = String::with_capacity(c.len_utf8() + END_OF_WORD.len_utf8());
    s.push(c);
    s.push(END_OF_WORD);
    s
}

/// Splits a pre-token into its initial symbols.
pub fn initial_symbols(pretoken: &str, mode: CorpusMode) -> Vec<String> {
    let mut out: Vec<String> = pretoken.chars().map(String::from).collect();
    if mode == CorpusMode::Text {
        if let Some(last) = out.last_mut() {
            last.push(END_OF_WORD);
        }
    }
    out
}

/// Number of corpus characters a token spans (the marker glyph is not one).
pub fn token_char_len(token: &str) -> usize {
    token.chars().filter(|&c| c != END_OF_WORD).count()
}

//! Corpus ingestion: raw text to pre-token counts.

use std::borrow::Cow;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use unicode_normalization::UnicodeNormalization;

use crate::error::{Error, Result};
use crate::{END_OF_WORD, UNK};

/// Longest record accepted in sequence mode.
pub const MAX_RECORD_BYTES: usize = 1 << 20;

/// Inputs smaller than this are counted on the calling thread.
const PARALLEL_THRESHOLD: usize = 1 << 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusMode {
    /// Pre-tokens are maximal runs of non-whitespace characters.
    Text,
    /// Every non-empty line is a single pre-token.
    Sequence,
}

impl fmt::Display for CorpusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CorpusMode::Text => "text",
            CorpusMode::Sequence => "sequence",
        })
    }
}

impl FromStr for CorpusMode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "text" => Ok(CorpusMode::Text),
            "sequence" => Ok(CorpusMode::Sequence),
            other => Err(format!(
                "unknown mode {other:?} (expected text or sequence)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Normalization {
    #[default]
    None,
    Nfc,
}

impl FromStr for Normalization {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "none" => Ok(Normalization::None),
            "nfc" => Ok(Normalization::Nfc),
            other => Err(format!(
                "unknown normalization {other:?} (expected none or nfc)"
            )),
        }
    }
}

impl Normalization {
    pub fn apply<'a>(&self, text: &'a str) -> Cow<'a, str> {
        match self {
            Normalization::None => Cow::Borrowed(text),
            Normalization::Nfc => Cow::Owned(text.nfc().collect()),
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Normalization::None => "none",
            Normalization::Nfc => "nfc",
        })
    }
}

/// Multiset of pre-tokens with their occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PretokenCounts {
    entries: BTreeMap<String, u64>,
    mode: CorpusMode,
    total_pretokens: u64,
    total_chars: u64,
}

impl PretokenCounts {
    /// Counts pre-tokens in an in-memory corpus.
    pub fn from_text(text: &str, mode: CorpusMode) -> Result<Self> {
        let shards = split_at_lines(text);
        let entries = if shards.len() > 1 {
            shards
                .into_par_iter()
                .map(|shard| count_shard(shard, mode))
                .try_reduce(BTreeMap::new, |a, b| Ok(merge_maps(a, b)))?
        } else {
            count_shard(text, mode)?
        };
        Self::from_entries(entries, mode)
    }

    /// Builds counts from an explicit table, validating every entry.
    pub fn from_entries(entries: BTreeMap<String, u64>, mode: CorpusMode) -> Result<Self> {
        let mut total_pretokens = 0u64;
        let mut total_chars = 0u64;
        for (token, &count) in &entries {
            if token.is_empty() || count == 0 {
                return Err(Error::InvalidVocabulary(format!(
                    "pre-token {token:?} with count {count}"
                )));
            }
            check_reserved(token)?;
            if mode == CorpusMode::Text && token.chars().any(char::is_whitespace) {
                return Err(Error::InvalidVocabulary(format!(
                    "text-mode pre-token {token:?} contains whitespace"
                )));
            }
            total_pretokens += count;
            total_chars += count * token.chars().count() as u64;
        }
        if total_pretokens == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(PretokenCounts {
            entries,
            mode,
            total_pretokens,
            total_chars,
        })
    }

    /// Sums two count tables loaded from shards of the same corpus.
    pub fn merge(self, other: PretokenCounts) -> Result<PretokenCounts> {
        if self.mode != other.mode {
            return Err(Error::ModeMismatch {
                vocab: self.mode,
                corpus: other.mode,
            });
        }
        let mode = self.mode;
        Self::from_entries(merge_maps(self.entries, other.entries), mode)
    }

    pub fn entries(&self) -> &BTreeMap<String, u64> {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(k, &v)| (k.as_str(), v))
    }

    pub fn mode(&self) -> CorpusMode {
        self.mode
    }

    /// Number of distinct pre-tokens.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn total_pretokens(&self) -> u64 {
        self.total_pretokens
    }

    pub fn total_chars(&self) -> u64 {
        self.total_chars
    }

    pub fn alphabet(&self) -> Alphabet {
        alphabet_of(self)
    }
}

/// Distinct characters of a corpus, sorted by code point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alphabet {
    symbols: Vec<char>,
}

impl Alphabet {
    pub fn new(symbols: impl IntoIterator<Item = char>) -> Self {
        let set: BTreeSet<char> = symbols.into_iter().collect();
        Alphabet {
            symbols: set.into_iter().collect(),
        }
    }

    pub fn symbols(&self) -> &[char] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, c: char) -> bool {
        self.symbols.binary_search(&c).is_ok()
    }
}

pub fn alphabet_of(counts: &PretokenCounts) -> Alphabet {
    Alphabet::new(counts.entries.keys().flat_map(|k| k.chars()))
}

pub fn load_corpus(
    path: impl AsRef<Path>,
    mode: CorpusMode,
    normalization: Normalization,
) -> Result<PretokenCounts> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let text = String::from_utf8(bytes).map_err(|_| Error::InvalidEncoding(path.to_path_buf()))?;
    PretokenCounts::from_text(&normalization.apply(&text), mode)
}

/// Pre-tokenizes a single input record according to `mode`.
pub fn pretokenize(record: &str, mode: CorpusMode) -> impl Iterator<Item = &str> {
    let (words, line) = match mode {
        CorpusMode::Text => (Some(record.split_whitespace()), None),
        CorpusMode::Sequence => (None, Some(record).filter(|r| !r.is_empty())),
    };
    words.into_iter().flatten().chain(line)
}

fn count_shard(text: &str, mode: CorpusMode) -> Result<BTreeMap<String, u64>> {
    let mut counts: rustc_hash::FxHashMap<&str, u64> = Default::default();
    match mode {
        CorpusMode::Text => {
            for word in text.split_whitespace() {
                *counts.entry(word).or_default() += 1;
            }
        }
        CorpusMode::Sequence => {
            for line in text.lines().filter(|l| !l.is_empty()) {
                if line.len() > MAX_RECORD_BYTES {
                    return Err(Error::RecordTooLong {
                        len: line.len(),
                        limit: MAX_RECORD_BYTES,
                    });
                }
                *counts.entry(line).or_default() += 1;
            }
        }
    }
    Ok(counts.into_iter().map(|(k, v)| (k.to_owned(), v)).collect())
}

fn check_reserved(token: &str) -> Result<()> {
    match token.chars().find(|&c| c == END_OF_WORD || c == UNK) {
        Some(c) => Err(Error::ReservedCharacter(c)),
        None => Ok(()),
    }
}

fn merge_maps(mut a: BTreeMap<String, u64>, b: BTreeMap<String, u64>) -> BTreeMap<String, u64> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, v) in b {
        *a.entry(k).or_default() += v;
    }
    a
}

/// Cuts `text` into roughly equal shards that end on line boundaries.
fn split_at_lines(text: &str) -> Vec<&str> {
    if text.len() < PARALLEL_THRESHOLD {
        return vec![text];
    }
    let target = (text.len() / rayon::current_num_threads().max(1)).max(PARALLEL_THRESHOLD / 4);
    let mut shards = Vec::new();
    let mut rest = text;
    while rest.len() > target {
        match rest[target..].find('\n') {
            Some(off) => {
                let (head, tail) = rest.split_at(target + off + 1);
                shards.push(head);
                rest = tail;
            }
            None => break,
        }
    }
    shards.push(rest);
    shards
}

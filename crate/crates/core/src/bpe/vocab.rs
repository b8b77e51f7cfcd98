use std::fmt::Write as _;
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::Deserialize;

use super::{reserved_tokens, word_final, MergeRule, Trainer};
use crate::corpus::{Alphabet, CorpusMode, PretokenCounts};
use crate::error::{Error, Result};
use crate::END_OF_WORD;

pub const FORMAT_VERSION: u32 = 1;

/// Frozen BPE vocabulary.
///
/// Token ids are implicit: reserved tokens first, then the alphabet in code
/// point order, then (text mode) the word-final form of every alphabet
/// symbol, then one id per merge rule in rank order. When two rules produce
/// the same string the string resolves to the lower id.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    mode: CorpusMode,
    alphabet: Alphabet,
    merges: Vec<MergeRule>,
    reserved: Vec<String>,
    tokens: Vec<String>,
    ids: FxHashMap<String, u32>,
    /// (left id, right id) -> [(rank, merged id)], ranks ascending.
    pub(super) merge_table: FxHashMap<(u32, u32), Vec<(u32, u32)>>,
}

impl PartialEq for Vocabulary {
    fn eq(&self, other: &Self) -> bool {
        self.mode == other.mode && self.alphabet == other.alphabet && self.merges == other.merges
    }
}

impl Eq for Vocabulary {}

/// Result of [`train_to_size`].
#[derive(Debug, Clone)]
pub struct TrainOutput {
    pub vocabulary: Vocabulary,
    /// Set when the corpus ran out of pairs before the target size.
    pub exhausted: bool,
}

/// Trains until the vocabulary holds `target` tokens or no pair is left.
pub fn train_to_size(counts: &PretokenCounts, target: usize) -> Result<TrainOutput> {
    let mut trainer = Trainer::new(counts);
    let minimum = trainer.min_vocab_size();
    if target < minimum {
        return Err(Error::InvalidTarget { target, minimum });
    }
    let reached = trainer.grow_to(target);
    Ok(TrainOutput {
        vocabulary: trainer.freeze(),
        exhausted: !reached,
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VocabFile {
    format_version: u32,
    mode: CorpusMode,
    alphabet: Vec<String>,
    merges: Vec<(String, String)>,
    reserved: Vec<String>,
    marker: Option<String>,
}

impl Vocabulary {
    /// Size of a vocabulary with no merges.
    pub fn min_size(mode: CorpusMode, alphabet_len: usize) -> usize {
        let base = match mode {
            CorpusMode::Text => 2 * alphabet_len,
            CorpusMode::Sequence => alphabet_len,
        };
        reserved_tokens(mode).len() + base
    }

    /// Validates a merge list against an alphabet and builds the id map.
    pub fn from_parts(
        mode: CorpusMode,
        alphabet: Alphabet,
        merges: Vec<MergeRule>,
    ) -> Result<Self> {
        let reserved = reserved_tokens(mode);
        let mut tokens: Vec<String> = reserved.clone();
        tokens.extend(alphabet.symbols().iter().map(|c| c.to_string()));
        if mode == CorpusMode::Text {
            tokens.extend(alphabet.symbols().iter().map(|&c| word_final(c)));
        }
        let mut ids: FxHashMap<String, u32> = FxHashMap::default();
        for (id, token) in tokens.iter().enumerate() {
            ids.entry(token.clone()).or_insert(id as u32);
        }

        let mut merge_table: FxHashMap<(u32, u32), Vec<(u32, u32)>> = FxHashMap::default();
        for (rank, rule) in merges.iter().enumerate() {
            if rule.rank != rank {
                return Err(Error::InvalidVocabulary(format!(
                    "merge {rank} carries rank {}",
                    rule.rank
                )));
            }
            if rule.merged != format!("{}{}", rule.left, rule.right) {
                return Err(Error::InvalidVocabulary(format!(
                    "merge {rank} result {:?} is not {:?} + {:?}",
                    rule.merged, rule.left, rule.right
                )));
            }
            let mergeable = |t: &str| {
                ids.get(t)
                    .copied()
                    .filter(|&id| id as usize >= reserved.len())
            };
            let (Some(l), Some(r)) = (mergeable(&rule.left), mergeable(&rule.right)) else {
                return Err(Error::InvalidVocabulary(format!(
                    "merge {rank} ({:?}, {:?}) uses an unknown token",
                    rule.left, rule.right
                )));
            };
            if rule.left.ends_with(END_OF_WORD) {
                return Err(Error::InvalidVocabulary(format!(
                    "merge {rank} continues past a word end"
                )));
            }
            let new_id = tokens.len() as u32;
            tokens.push(rule.merged.clone());
            let merged = *ids.entry(rule.merged.clone()).or_insert(new_id);
            merge_table
                .entry((l, r))
                .or_default()
                .push((rank as u32, merged));
        }

        Ok(Vocabulary {
            mode,
            alphabet,
            merges,
            reserved,
            tokens,
            ids,
            merge_table,
        })
    }

    pub fn mode(&self) -> CorpusMode {
        self.mode
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    pub fn reserved(&self) -> &[String] {
        &self.reserved
    }

    /// Total number of ids.
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn token(&self, id: u32) -> Option<&str> {
        self.tokens.get(id as usize).map(String::as_str)
    }

    pub fn id(&self, token: &str) -> Option<u32> {
        self.ids.get(token).copied()
    }

    pub fn unk_id(&self) -> u32 {
        0
    }

    /// Id of the bare end-of-word token (text mode only).
    pub fn marker_id(&self) -> Option<u32> {
        (self.mode == CorpusMode::Text).then_some(1)
    }

    pub fn is_reserved(&self, id: u32) -> bool {
        (id as usize) < self.reserved.len()
    }

    /// Same vocabulary keeping only the first `n` merges.
    pub fn truncated(&self, n: usize) -> Vocabulary {
        let merges = self.merges[..n.min(self.merges.len())].to_vec();
        Vocabulary::from_parts(self.mode, self.alphabet.clone(), merges)
            .expect("a prefix of valid merges is valid")
    }

    /// Serialized JSON document; ids are implied by order.
    pub fn to_json(&self) -> String {
        let q = |s: &str| serde_json::to_string(s).expect("strings serialize");
        let list = |items: &mut dyn Iterator<Item = String>| {
            items.map(|s| q(&s)).collect::<Vec<_>>().join(", ")
        };
        let mut out = String::new();
        out.push_str("{\n");
        let _ = writeln!(out, "  \"format_version\": {FORMAT_VERSION},");
        let _ = writeln!(out, "  \"mode\": {},", q(&self.mode.to_string()));
        let _ = writeln!(
            out,
            "  \"alphabet\": [{}],",
            list(&mut self.alphabet.symbols().iter().map(|c| c.to_string()))
        );
        if self.merges.is_empty() {
            out.push_str("  \"merges\": [],\n");
        } else {
            out.push_str("  \"merges\": [\n");
            for (i, rule) in self.merges.iter().enumerate() {
                let sep = if i + 1 == self.merges.len() { "" } else { "," };
                let _ = writeln!(out, "    [{}, {}]{sep}", q(&rule.left), q(&rule.right));
            }
            out.push_str("  ],\n");
        }
        let _ = writeln!(
            out,
            "  \"reserved\": [{}],",
            list(&mut self.reserved.iter().cloned())
        );
        let marker = match self.mode {
            CorpusMode::Text => q(&END_OF_WORD.to_string()),
            CorpusMode::Sequence => "null".to_string(),
        };
        let _ = writeln!(out, "  \"marker\": {marker}");
        out.push_str("}\n");
        out
    }

    pub fn from_json(json: &str) -> Result<Self> {
        let file: VocabFile = serde_json::from_str(json)?;
        if file.format_version != FORMAT_VERSION {
            return Err(Error::InvalidVocabulary(format!(
                "unsupported format_version {}",
                file.format_version
            )));
        }
        let mut symbols = Vec::with_capacity(file.alphabet.len());
        for s in &file.alphabet {
            let mut chars = s.chars();
            match (chars.next(), chars.next()) {
                (Some(c), None) => symbols.push(c),
                _ => {
                    return Err(Error::InvalidVocabulary(format!(
                        "alphabet entry {s:?} is not a single character"
                    )))
                }
            }
        }
        if symbols.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidVocabulary(
                "alphabet is not strictly sorted".into(),
            ));
        }
        if file.reserved != reserved_tokens(file.mode) {
            return Err(Error::InvalidVocabulary(format!(
                "reserved tokens {:?} do not match mode {}",
                file.reserved, file.mode
            )));
        }
        let expected_marker = match file.mode {
            CorpusMode::Text => Some(END_OF_WORD.to_string()),
            CorpusMode::Sequence => None,
        };
        if file.marker != expected_marker {
            return Err(Error::InvalidVocabulary(format!(
                "marker {:?} does not match mode {}",
                file.marker, file.mode
            )));
        }
        let merges = file
            .merges
            .into_iter()
            .enumerate()
            .map(|(rank, (l, r))| MergeRule::new(l, r, rank))
            .collect();
        Vocabulary::from_parts(file.mode, Alphabet::new(symbols), merges)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let json = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&json)
    }
}

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::sync::Arc;

use rustc_hash::FxHashMap;

use super::{initial_symbols, reserved_tokens, word_final, MergeRule, Vocabulary};
use crate::corpus::{Alphabet, CorpusMode, PretokenCounts};
use crate::error::{Error, Result};
use crate::zipf::TokenFrequencyTable;

type SymbolId = u32;
type Pair = (SymbolId, SymbolId);

/// Most frequent adjacent pair at some point of training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeCandidate {
    pub left: String,
    pub right: String,
    pub count: u64,
}

#[derive(Debug, Clone)]
struct Word {
    symbols: Vec<SymbolId>,
    count: u64,
}

/// Heap entry; may be stale; validated against `pair_counts` on pop.
#[derive(Debug, Clone, PartialEq, Eq)]
struct QueuedPair {
    count: u64,
    left: Arc<str>,
    right: Arc<str>,
    pair: Pair,
}

impl Ord for QueuedPair {
    fn cmp(&self, other: &Self) -> Ordering {
        // Highest count first; ties go to the lexicographically smallest pair.
        self.count
            .cmp(&other.count)
            .then_with(|| other.left.cmp(&self.left))
            .then_with(|| other.right.cmp(&self.right))
    }
}

impl PartialOrd for QueuedPair {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Live BPE training state.
///
/// Pair counts are maintained incrementally: a merge only visits the words
/// that contain the merged pair and only touches the pairs adjacent to each
/// rewritten position. The best pair comes from a max-heap whose entries are
/// invalidated lazily.
#[derive(Debug, Clone)]
pub struct Trainer {
    mode: CorpusMode,
    alphabet: Alphabet,
    reserved: Vec<String>,
    tokens: Vec<Arc<str>>,
    token_ids: FxHashMap<Arc<str>, SymbolId>,
    pretokens: Vec<String>,
    words: Vec<Word>,
    pair_counts: FxHashMap<Pair, u64>,
    pair_words: FxHashMap<Pair, Vec<u32>>,
    token_counts: Vec<u64>,
    /// Number of tokens per non-zero count.
    count_histogram: BTreeMap<u64, u64>,
    queue: BinaryHeap<QueuedPair>,
    merges: Vec<MergeRule>,
    total_chars: u64,
}

impl Trainer {
    pub fn new(counts: &PretokenCounts) -> Self {
        let mode = counts.mode();
        let alphabet = counts.alphabet();
        let mut trainer = Trainer {
            mode,
            reserved: reserved_tokens(mode),
            alphabet: alphabet.clone(),
            tokens: Vec::new(),
            token_ids: FxHashMap::default(),
            pretokens: Vec::with_capacity(counts.len()),
            words: Vec::with_capacity(counts.len()),
            pair_counts: FxHashMap::default(),
            pair_words: FxHashMap::default(),
            token_counts: Vec::new(),
            count_histogram: BTreeMap::new(),
            queue: BinaryHeap::new(),
            merges: Vec::new(),
            total_chars: counts.total_chars(),
        };
        for &c in alphabet.symbols() {
            trainer.intern(&c.to_string());
        }
        if mode == CorpusMode::Text {
            for &c in alphabet.symbols() {
                trainer.intern(&word_final(c));
            }
        }

        for (pretoken, count) in counts.iter() {
            let symbols: Vec<SymbolId> = initial_symbols(pretoken, mode)
                .iter()
                .map(|s| trainer.token_ids[s.as_str()])
                .collect();
            let idx = trainer.words.len() as u32;
            for &s in &symbols {
                trainer.token_counts[s as usize] += count;
            }
            for w in symbols.windows(2) {
                let pair = (w[0], w[1]);
                *trainer.pair_counts.entry(pair).or_default() += count;
                let list = trainer.pair_words.entry(pair).or_default();
                if list.last() != Some(&idx) {
                    list.push(idx);
                }
            }
            trainer.pretokens.push(pretoken.to_owned());
            trainer.words.push(Word { symbols, count });
        }

        for &n in trainer.token_counts.iter().filter(|&&n| n > 0) {
            *trainer.count_histogram.entry(n).or_default() += 1;
        }

        let queued: Vec<QueuedPair> = trainer
            .pair_counts
            .iter()
            .map(|(&pair, &count)| trainer.queued(pair, count))
            .collect();
        trainer.queue = BinaryHeap::from(queued);
        trainer
    }

    pub fn mode(&self) -> CorpusMode {
        self.mode
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn reserved(&self) -> &[String] {
        &self.reserved
    }

    pub fn merges(&self) -> &[MergeRule] {
        &self.merges
    }

    /// Vocabulary size before any merge: reserved tokens plus base symbols.
    pub fn min_vocab_size(&self) -> usize {
        Vocabulary::min_size(self.mode, self.alphabet.len())
    }

    pub fn vocab_size(&self) -> usize {
        self.min_vocab_size() + self.merges.len()
    }

    pub fn total_chars(&self) -> u64 {
        self.total_chars
    }

    /// Most frequent adjacent pair; ties go to the smallest `(left, right)`.
    pub fn best_pair(&mut self) -> Option<MergeCandidate> {
        self.peek_valid().map(|q| MergeCandidate {
            left: q.left.to_string(),
            right: q.right.to_string(),
            count: q.count,
        })
    }

    /// Replaces every non-overlapping left-to-right occurrence of
    /// `(left, right)` and returns the recorded rule.
    pub fn apply_merge(&mut self, left: &str, right: &str) -> Result<MergeRule> {
        let pair = match (self.token_ids.get(left), self.token_ids.get(right)) {
            (Some(&l), Some(&r)) if self.pair_counts.contains_key(&(l, r)) => (l, r),
            _ => {
                return Err(Error::InconsistentState {
                    left: left.to_owned(),
                    right: right.to_owned(),
                })
            }
        };
        Ok(self.merge_pair(pair))
    }

    /// Applies the current best pair, or returns `None` once no pair is left.
    pub fn step(&mut self) -> Option<&MergeRule> {
        let pair = self.peek_valid()?.pair;
        self.merge_pair(pair);
        self.merges.last()
    }

    /// Merges until `vocab_size() == target` or pairs run out. Returns
    /// whether the target was reached.
    pub fn grow_to(&mut self, target: usize) -> bool {
        while self.vocab_size() < target {
            if self.step().is_none() {
                return false;
            }
        }
        true
    }

    /// Token histogram of the corpus under the current merges.
    pub fn token_counts(&self) -> TokenFrequencyTable {
        TokenFrequencyTable::from_counts(
            self.token_counts
                .iter()
                .enumerate()
                .filter(|&(_, &n)| n > 0)
                .map(|(id, &n)| (self.tokens[id].to_string(), n)),
        )
    }

    /// Non-zero token frequencies, unordered.
    pub fn frequencies(&self) -> Vec<u64> {
        self.token_counts
            .iter()
            .copied()
            .filter(|&n| n > 0)
            .collect()
    }

    /// Number of distinct tokens at each non-zero count.
    pub fn frequency_histogram(&self) -> &BTreeMap<u64, u64> {
        &self.count_histogram
    }

    /// Adjacent-pair counts weighted by pre-token counts.
    pub fn pair_index(&self) -> BTreeMap<(String, String), u64> {
        self.pair_counts
            .iter()
            .map(|(&(l, r), &n)| {
                (
                    (
                        self.tokens[l as usize].to_string(),
                        self.tokens[r as usize].to_string(),
                    ),
                    n,
                )
            })
            .collect()
    }

    /// Current segmentation of every pre-token, in pre-token order.
    pub fn sequences(&self) -> impl Iterator<Item = (&str, Vec<&str>, u64)> + '_ {
        self.pretokens.iter().zip(&self.words).map(|(p, w)| {
            let symbols = w
                .symbols
                .iter()
                .map(|&s| &*self.tokens[s as usize])
                .collect();
            (p.as_str(), symbols, w.count)
        })
    }

    /// Snapshot of the current merge list as a frozen vocabulary.
    pub fn freeze(&self) -> Vocabulary {
        Vocabulary::from_parts(self.mode, self.alphabet.clone(), self.merges.clone())
            .expect("trainer merges always form a valid vocabulary")
    }

    fn adjust_count(&mut self, id: SymbolId, delta: i64) {
        if delta == 0 {
            return;
        }
        let slot = &mut self.token_counts[id as usize];
        let old = *slot;
        let new = (old as i64 + delta) as u64;
        *slot = new;
        if old > 0 {
            if let Some(m) = self.count_histogram.get_mut(&old) {
                *m -= 1;
                if *m == 0 {
                    self.count_histogram.remove(&old);
                }
            }
        }
        if new > 0 {
            *self.count_histogram.entry(new).or_default() += 1;
        }
    }

    fn intern(&mut self, token: &str) -> SymbolId {
        if let Some(&id) = self.token_ids.get(token) {
            return id;
        }
        let id = self.tokens.len() as SymbolId;
        let token: Arc<str> = Arc::from(token);
        self.tokens.push(token.clone());
        self.token_ids.insert(token, id);
        self.token_counts.push(0);
        id
    }

    fn queued(&self, pair: Pair, count: u64) -> QueuedPair {
        QueuedPair {
            count,
            left: self.tokens[pair.0 as usize].clone(),
            right: self.tokens[pair.1 as usize].clone(),
            pair,
        }
    }

    fn peek_valid(&mut self) -> Option<&QueuedPair> {
        loop {
            let top = self.queue.peek()?;
            let current = self.pair_counts.get(&top.pair).copied().unwrap_or(0);
            if current == top.count {
                break;
            }
            let stale = self.queue.pop().expect("peeked");
            if current > 0 && current < stale.count {
                self.queue.push(QueuedPair {
                    count: current,
                    ..stale
                });
            }
        }
        self.queue.peek()
    }

    fn merge_pair(&mut self, pair: Pair) -> MergeRule {
        let (left, right) = pair;
        let rule = MergeRule::new(
            &*self.tokens[left as usize],
            &*self.tokens[right as usize],
            self.merges.len(),
        );
        let merged = self.intern(&rule.merged);

        let mut affected = self.pair_words.remove(&pair).unwrap_or_default();
        affected.sort_unstable();
        affected.dedup();

        let mut deltas: FxHashMap<Pair, i64> = FxHashMap::default();
        let mut occurrences = Vec::new();
        let mut positions = Vec::new();
        let mut replaced = 0u64;
        for idx in affected {
            let word = &mut self.words[idx as usize];
            let n = merge_word(
                word,
                pair,
                merged,
                &mut occurrences,
                &mut positions,
                |p, d| {
                    *deltas.entry(p).or_default() += d;
                    if d > 0 {
                        let list = self.pair_words.entry(p).or_default();
                        if list.last() != Some(&idx) {
                            list.push(idx);
                        }
                    }
                },
            );
            replaced += n * word.count;
        }

        self.adjust_count(left, -(replaced as i64));
        self.adjust_count(right, -(replaced as i64));
        self.adjust_count(merged, replaced as i64);

        for (p, d) in deltas {
            if d == 0 {
                continue;
            }
            let count = self.pair_counts.entry(p).or_default();
            let updated = (*count as i64 + d) as u64;
            debug_assert!(*count as i64 + d >= 0, "pair count went negative");
            if updated == 0 {
                self.pair_counts.remove(&p);
            } else {
                *count = updated;
                if d > 0 {
                    let q = self.queued(p, updated);
                    self.queue.push(q);
                }
            }
        }
        debug_assert!(!self.pair_counts.contains_key(&pair));

        self.merges.push(rule.clone());
        rule
    }
}

/// Rewrites one word in place and reports the pair-count deltas through
/// `delta`. Returns the number of replaced occurrences.
fn merge_word(
    word: &mut Word,
    (left, right): Pair,
    merged: SymbolId,
    occurrences: &mut Vec<usize>,
    positions: &mut Vec<usize>,
    mut delta: impl FnMut(Pair, i64),
) -> u64 {
    let old = &word.symbols;
    let n = old.len();
    occurrences.clear();
    let mut i = 0;
    while i + 1 < n {
        if old[i] == left && old[i + 1] == right {
            occurrences.push(i);
            i += 2;
        } else {
            i += 1;
        }
    }
    if occurrences.is_empty() {
        return 0;
    }
    let count = word.count as i64;

    // Old pairs touching a rewritten position.
    let mut next_free = 0usize;
    for &p in occurrences.iter() {
        for j in p.saturating_sub(1)..=p + 1 {
            if j >= next_free && j + 1 < n {
                delta((old[j], old[j + 1]), -count);
                next_free = j + 1;
            }
        }
    }

    let mut new = Vec::with_capacity(n - occurrences.len());
    positions.clear();
    let mut occ = occurrences.iter().peekable();
    let mut i = 0;
    while i < n {
        if occ.peek() == Some(&&i) {
            occ.next();
            positions.push(new.len());
            new.push(merged);
            i += 2;
        } else {
            new.push(old[i]);
            i += 1;
        }
    }

    // New pairs touching a merged symbol.
    let mut next_free = 0usize;
    for &q in positions.iter() {
        for k in q.saturating_sub(1)..=q {
            if k >= next_free && k + 1 < new.len() {
                delta((new[k], new[k + 1]), count);
                next_free = k + 1;
            }
        }
    }

    word.symbols = new;
    occurrences.len() as u64
}

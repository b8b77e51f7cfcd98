mod support;

use std::collections::BTreeMap;

use proptest::prelude::*;
use support::{naive_bpe, small_corpus};
use zipfbpe::bpe::token_char_len;
use zipfbpe::zipf::token_frequencies;
use zipfbpe::{train_to_size, CorpusMode, PretokenCounts, Trainer, Vocabulary};

fn counts(words: &BTreeMap<String, u64>, mode: CorpusMode) -> PretokenCounts {
    PretokenCounts::from_entries(words.clone(), mode).unwrap()
}

fn mode_strategy() -> impl Strategy<Value = CorpusMode> {
    prop_oneof![Just(CorpusMode::Text), Just(CorpusMode::Sequence)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn matches_naive_rescan(words in small_corpus(), mode in mode_strategy(), merges in 0usize..=30) {
        let oracle = naive_bpe(&words, mode == CorpusMode::Text, merges);
        let mut trainer = Trainer::new(&counts(&words, mode));
        while trainer.merges().len() < merges && trainer.step().is_some() {}
        let got: Vec<(String, String)> = trainer
            .merges()
            .iter()
            .map(|m| (m.left.clone(), m.right.clone()))
            .collect();
        prop_assert_eq!(got, oracle.merges);
        let table = trainer.token_counts();
        prop_assert_eq!(table.counts(), &oracle.token_counts);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn frozen_vocab_reproduces_trainer_counts(words in small_corpus(), mode in mode_strategy(), merges in 0usize..=30) {
        let c = counts(&words, mode);
        let mut trainer = Trainer::new(&c);
        while trainer.merges().len() < merges && trainer.step().is_some() {}
        let vocab = trainer.freeze();
        prop_assert_eq!(token_frequencies(&vocab, &c).unwrap(), trainer.token_counts());
    }

    #[test]
    fn characters_are_conserved(words in small_corpus(), mode in mode_strategy()) {
        let c = counts(&words, mode);
        let mut trainer = Trainer::new(&c);
        loop {
            let covered: u64 = trainer
                .token_counts()
                .counts()
                .iter()
                .map(|(t, &n)| token_char_len(t) as u64 * n)
                .sum();
            prop_assert_eq!(covered, c.total_chars());
            let mut histogram = BTreeMap::new();
            for &n in trainer.token_counts().counts().values() {
                *histogram.entry(n).or_insert(0u64) += 1;
            }
            prop_assert_eq!(trainer.frequency_histogram(), &histogram);
            if trainer.step().is_none() {
                break;
            }
        }
    }

    #[test]
    fn each_merge_adds_one_token(words in small_corpus(), mode in mode_strategy()) {
        let mut trainer = Trainer::new(&counts(&words, mode));
        let mut size = trainer.vocab_size();
        prop_assert_eq!(size, trainer.min_vocab_size());
        while trainer.step().is_some() {
            prop_assert_eq!(trainer.vocab_size(), size + 1);
            size += 1;
        }
    }

    #[test]
    fn training_is_deterministic(words in small_corpus(), mode in mode_strategy(), extra in 0usize..40) {
        let c = counts(&words, mode);
        let target = Trainer::new(&c).min_vocab_size() + extra;
        let a = train_to_size(&c, target).unwrap().vocabulary.to_json();
        let b = train_to_size(&c, target).unwrap().vocabulary.to_json();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn json_round_trip(words in small_corpus(), mode in mode_strategy(), extra in 0usize..40) {
        let c = counts(&words, mode);
        let target = Trainer::new(&c).min_vocab_size() + extra;
        let vocab = train_to_size(&c, target).unwrap().vocabulary;
        let json = vocab.to_json();
        let back = Vocabulary::from_json(&json).unwrap();
        prop_assert_eq!(&back, &vocab);
        prop_assert_eq!(back.to_json(), json);
    }

    #[test]
    fn truncation_equals_shorter_training(words in small_corpus(), mode in mode_strategy(), a in 0usize..30, b in 0usize..30) {
        let c = counts(&words, mode);
        let min = Trainer::new(&c).min_vocab_size();
        let (short, long) = (a.min(b), a.max(b));
        let full = train_to_size(&c, min + long).unwrap().vocabulary;
        let short_vocab = train_to_size(&c, min + short).unwrap().vocabulary;
        let n = short_vocab.merges().len();
        prop_assert_eq!(full.truncated(n), short_vocab);
    }

    #[test]
    fn text_round_trip(words in small_corpus(), merges in 0usize..30, picks in proptest::collection::vec(any::<prop::sample::Index>(), 1..20)) {
        let c = counts(&words, CorpusMode::Text);
        let min = Trainer::new(&c).min_vocab_size();
        let vocab = train_to_size(&c, min + merges).unwrap().vocabulary;
        // Sentences reuse the training alphabet but not necessarily its words.
        let alphabet = vocab.alphabet().symbols().to_vec();
        let sentence: Vec<String> = picks
            .chunks(3)
            .map(|chunk| chunk.iter().map(|i| *i.get(&alphabet)).collect())
            .collect();
        let input = sentence.join(" ");
        prop_assert_eq!(vocab.decode(&vocab.encode(&input)).unwrap(), input);
    }
}

#[test]
fn sharded_counting_matches_single_pass() {
    let text = zipfbpe::synth::two_phase(200, 4000, 20_000, 3).repeat(4);
    assert!(text.len() > 1 << 20);
    let sharded = PretokenCounts::from_text(&text, CorpusMode::Text).unwrap();
    let mut single: BTreeMap<String, u64> = BTreeMap::new();
    for word in text.split_whitespace() {
        *single.entry(word.to_string()).or_default() += 1;
    }
    assert_eq!(sharded.entries(), &single);
    assert_eq!(sharded.total_pretokens(), single.values().sum::<u64>());
}

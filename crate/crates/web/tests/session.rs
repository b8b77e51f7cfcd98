use serde_json::Value;
use zipfbpe_web::{sample, Session};

fn parse(json: &str) -> Value {
    serde_json::from_str(json).expect("valid JSON")
}

#[test]
fn train_reports_fit_and_plot() {
    let corpus = sample("zipf", 1).unwrap();
    let mut session = Session::new(&corpus, "text").unwrap();
    let info = parse(&session.corpus_info());
    assert_eq!(info["mode"], "text");
    let min = info["min_vocab"].as_u64().unwrap() as usize;

    let out = parse(&session.train(min + 400).unwrap());
    assert_eq!(out["vocab_size"], min + 400);
    let r2 = out["fit"]["r_squared"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&r2));
    assert!(out["fertility"].as_f64().unwrap() >= 1.0);
    assert!(out["svg"].as_str().unwrap().starts_with("<svg"));
    assert_eq!(out["top_tokens"].as_array().unwrap().len(), 20);
}

#[test]
fn train_below_minimum_is_an_error() {
    let mut session = Session::new("ab ba", "text").unwrap();
    assert!(session.train(2).is_err());
}

#[test]
fn select_trace_matches_library() {
    let corpus = sample("zipf", 2).unwrap();
    let mut session = Session::new(&corpus, "text").unwrap();
    let out = parse(&session.select(50, 1e-3, 5, 50_000, false).unwrap());
    assert_eq!(out["stop_reason"], "stagnation");

    let counts = zipfbpe::PretokenCounts::from_text(&corpus, zipfbpe::CorpusMode::Text).unwrap();
    let config = zipfbpe::SelectorConfig {
        checkpoint_interval: 50,
        epsilon: 1e-3,
        patience: 5,
        ..Default::default()
    };
    let expected = zipfbpe::select_vocabulary(&counts, &config).unwrap();
    assert_eq!(out["trace_csv"], expected.trace_csv());
    assert_eq!(out["selected_size"], expected.selected_size);
    assert_eq!(out["trace"].as_array().unwrap().len(), expected.trace.len());
    assert_eq!(session.vocab_json(), expected.selected_vocab.to_json());
}

#[test]
fn encode_uses_current_vocabulary() {
    let mut session = Session::new("abab abab abab", "text").unwrap();
    let before = parse(&session.encode("abab").unwrap());
    assert_eq!(before["tokens"].as_array().unwrap().len(), 4);
    session.train(9).unwrap();
    let after = parse(&session.encode("abab").unwrap());
    assert_eq!(after["tokens"], serde_json::json!(["abab\u{2581}"]));
    assert_eq!(after["decoded"], "abab");
}

#[test]
fn rejects_bad_input() {
    assert!(Session::new("", "text").is_err());
    assert!(Session::new("abc", "prose").is_err());
    assert!(sample("klingon", 1).is_err());
    let dna = sample("dna", 3).unwrap();
    let session = Session::new(&dna, "sequence").unwrap();
    assert_eq!(parse(&session.corpus_info())["alphabet"], 4);
}

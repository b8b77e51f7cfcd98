use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use zipfbpe::zipf::{compression_ratio, fertility, token_frequencies};
use zipfbpe::{fit_power_law, load_corpus, rank_frequency, CorpusMode, Normalization, Vocabulary};

fn zipfbpe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zipfbpe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn zipfbpe_stdin(args: &[&str], stdin: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_zipfbpe"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child
        .stdin
        .take()
        .unwrap()
        .write_all(stdin.as_bytes())
        .unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, contents: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn train(corpus: &Path, mode: &str, size: usize, out: &Path) -> Output {
    zipfbpe(&[
        "train",
        "--corpus",
        s(corpus),
        "--mode",
        mode,
        "--vocab-size",
        &size.to_string(),
        "--out",
        s(out),
    ])
}

fn key_values(text: &str) -> Vec<(String, String)> {
    text.lines()
        .map(|l| {
            let (k, v) = l.split_once('=').expect("key=value line");
            (k.to_string(), v.to_string())
        })
        .collect()
}

#[test]
fn train_at_minimum_gives_characters_only() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "toy.txt", "ab ba\nb a\n");
    let out = dir.path().join("vocab.json");
    // Two reserved tokens plus plain and word-final forms of a and b.
    let run = train(&corpus, "text", 6, &out);
    assert!(run.status.success(), "{run:?}");
    let vocab = Vocabulary::load(&out).unwrap();
    assert!(vocab.merges().is_empty());
    assert_eq!(vocab.len(), 6);
    assert!(dir.path().join("vocab.manifest.json").exists());
}

#[test]
fn train_writes_expected_merges() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "abab.txt", "abab\nabab\n");
    let out = dir.path().join("vocab.json");
    assert!(train(&corpus, "sequence", 5, &out).status.success());
    let json = std::fs::read_to_string(&out).unwrap();
    assert!(
        json.contains("[\"a\", \"b\"],\n    [\"ab\", \"ab\"]"),
        "{json}"
    );

    let manifest: serde_json::Value = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("vocab.manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["command"], "train");
    assert_eq!(manifest["config"]["vocab_size"], 5);
    assert_eq!(manifest["outputs"][0], "vocab.json");
    assert_eq!(manifest["corpus_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn train_is_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.txt",
        &zipfbpe::synth::two_phase(50, 400, 100, 9),
    );
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    assert!(train(&corpus, "text", 300, &a).status.success());
    assert!(train(&corpus, "text", 300, &b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let manifest = |name: &str| -> serde_json::Value {
        let mut m: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
        m.as_object_mut().unwrap().remove("outputs");
        m
    };
    assert_eq!(manifest("a.manifest.json"), manifest("b.manifest.json"));
}

#[test]
fn missing_corpus_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("vocab.json");
    let run = train(&dir.path().join("absent.txt"), "text", 10, &out);
    assert_eq!(run.status.code(), Some(3));
    assert!(!String::from_utf8_lossy(&run.stderr).is_empty());
    assert!(!out.exists());
}

#[test]
fn bad_arguments_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "toy.txt", "ab\n");
    let out = dir.path().join("vocab.json");
    assert_eq!(train(&corpus, "text", 3, &out).status.code(), Some(2));
    assert_eq!(train(&corpus, "prose", 10, &out).status.code(), Some(2));
    assert!(!out.exists());
    assert_eq!(zipfbpe(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn score_reports_exact_power_law() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "pl.txt", &zipfbpe::synth::power_law_chars());
    let vocab = dir.path().join("v.json");
    assert!(train(&corpus, "sequence", 7, &vocab).status.success());
    let run = zipfbpe(&["score", "--corpus", s(&corpus), "--vocab", s(&vocab)]);
    assert!(run.status.success());
    let kv = key_values(&stdout(&run));
    let r2: f64 = kv
        .iter()
        .find(|(k, _)| k == "r_squared")
        .unwrap()
        .1
        .parse()
        .unwrap();
    assert!((r2 - 1.0).abs() < 1e-12, "{r2}");
    assert!(kv.iter().all(|(k, _)| k != "fertility"));
}

#[test]
fn score_flags_uniform_corpus_as_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "u.txt", &zipfbpe::synth::uniform_chars(5, 4));
    let vocab = dir.path().join("v.json");
    assert!(train(&corpus, "sequence", 6, &vocab).status.success());
    let run = zipfbpe(&["score", "--corpus", s(&corpus), "--vocab", s(&vocab)]);
    let text = stdout(&run);
    assert!(text.contains("r_squared=0.0\n"), "{text}");
    assert!(text.contains("degenerate=true\n"), "{text}");
}

#[test]
fn score_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.txt",
        &zipfbpe::synth::two_phase(80, 600, 200, 4),
    );
    let vocab_path = dir.path().join("v.json");
    assert!(train(&corpus, "text", 200, &vocab_path).status.success());
    let run = zipfbpe(&["score", "--corpus", s(&corpus), "--vocab", s(&vocab_path)]);
    assert!(run.status.success());

    let vocab = Vocabulary::load(&vocab_path).unwrap();
    let counts = load_corpus(&corpus, CorpusMode::Text, Normalization::None).unwrap();
    let fit = fit_power_law(&rank_frequency(&token_frequencies(&vocab, &counts).unwrap()).unwrap())
        .unwrap();
    let expected = format!(
        "{}compression_ratio={:?}\nfertility={:?}\n",
        fit.report(),
        compression_ratio(&vocab, &counts).unwrap(),
        fertility(&vocab, &counts).unwrap()
    );
    assert_eq!(stdout(&run), expected);
}

#[test]
fn score_rejects_mode_mismatch() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.txt", "abc abd\n");
    let vocab = dir.path().join("v.json");
    assert!(train(&corpus, "sequence", 6, &vocab).status.success());
    let run = zipfbpe(&[
        "score",
        "--corpus",
        s(&corpus),
        "--vocab",
        s(&vocab),
        "--mode",
        "text",
    ]);
    assert_eq!(run.status.code(), Some(2));
}

fn select(corpus: &Path, out_dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["select", "--corpus", s(corpus), "--out-dir", s(out_dir)];
    args.extend_from_slice(extra);
    zipfbpe(&args)
}

#[test]
fn select_stops_on_plateau_and_streams_trace() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.txt",
        &zipfbpe::synth::two_phase(300, 3000, 3000, 1),
    );
    let out_dir = dir.path().join("run");
    let run = select(
        &corpus,
        &out_dir,
        &["--interval", "50", "--patience", "5", "--epsilon", "1e-3"],
    );
    assert!(run.status.success(), "{run:?}");
    let streamed = stdout(&run);
    let summary = streamed.lines().last().unwrap();
    assert!(
        summary.starts_with("# stop_reason=stagnation,"),
        "{summary}"
    );
    assert_eq!(
        std::fs::read_to_string(out_dir.join("trace.csv")).unwrap(),
        streamed
    );

    let mut names: Vec<String> = std::fs::read_dir(&out_dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["manifest.json", "trace.csv", "vocab.json"]);

    let size: usize = summary
        .split(',')
        .find_map(|f| f.strip_prefix("selected_size="))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(
        Vocabulary::load(out_dir.join("vocab.json")).unwrap().len(),
        size
    );
}

#[test]
fn select_with_max_at_minimum_has_one_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.txt", "abc abd bcd\n");
    let out_dir = dir.path().join("run");
    // Alphabet a..d: 2 reserved + 4 + 4 word-final forms.
    let run = select(&corpus, &out_dir, &["--v-max", "10"]);
    assert!(run.status.success(), "{run:?}");
    let text = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0,10,"));
    assert!(lines[2].starts_with("# stop_reason=max_size,selected_size=10,"));
}

#[test]
fn failed_select_leaves_no_vocabulary() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.txt", "abc abd bcd\n");
    let out_dir = dir.path().join("run");
    let run = select(&corpus, &out_dir, &["--v-min", "20", "--v-max", "15"]);
    assert_eq!(run.status.code(), Some(2));
    assert!(!out_dir.join("vocab.json").exists());
    assert!(!out_dir.join("trace.csv").exists());
}

#[test]
fn rankfreq_matches_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(
        dir.path(),
        "c.txt",
        &zipfbpe::synth::two_phase(40, 300, 50, 2),
    );
    let vocab_path = dir.path().join("v.json");
    assert!(train(&corpus, "text", 150, &vocab_path).status.success());
    let (csv, svg) = (dir.path().join("rf.csv"), dir.path().join("rf.svg"));
    let run = zipfbpe(&[
        "rankfreq",
        "--corpus",
        s(&corpus),
        "--vocab",
        s(&vocab_path),
        "--csv",
        s(&csv),
        "--svg",
        s(&svg),
    ]);
    assert!(run.status.success(), "{run:?}");

    let vocab = Vocabulary::load(&vocab_path).unwrap();
    let counts = load_corpus(&corpus, CorpusMode::Text, Normalization::None).unwrap();
    let table = token_frequencies(&vocab, &counts).unwrap();
    let written = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(written, rank_frequency(&table).unwrap().to_csv());
    assert_eq!(written.lines().count() - 1, table.len());
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn rankfreq_with_no_known_tokens_fails() {
    let dir = tempfile::tempdir().unwrap();
    let train_corpus = write(dir.path(), "a.txt", "abab\n");
    let other = write(dir.path(), "b.txt", "xyz\n");
    let vocab = dir.path().join("v.json");
    assert!(train(&train_corpus, "sequence", 3, &vocab).status.success());
    let csv = dir.path().join("rf.csv");
    let run = zipfbpe(&[
        "rankfreq",
        "--corpus",
        s(&other),
        "--vocab",
        s(&vocab),
        "--csv",
        s(&csv),
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&run.stderr).contains("empty"));
    assert!(!csv.exists());
}

#[test]
fn encode_show_tokens_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "abab.txt", "abab\nabab\n");
    let vocab = dir.path().join("v.json");
    assert!(train(&corpus, "sequence", 5, &vocab).status.success());
    let run = zipfbpe_stdin(&["encode", "--vocab", s(&vocab), "--show-tokens"], "abab\n");
    assert_eq!(stdout(&run), "abab\n");

    let text = "the cat sat on the mat\nthe mat sat\n";
    let corpus = write(dir.path(), "t.txt", text);
    let vocab = dir.path().join("t.json");
    assert!(train(&corpus, "text", 30, &vocab).status.success());
    let ids = zipfbpe_stdin(&["encode", "--vocab", s(&vocab)], text);
    assert!(ids.status.success());
    let back = zipfbpe_stdin(&["decode", "--vocab", s(&vocab)], &stdout(&ids));
    assert_eq!(stdout(&back), text);
}

#[test]
fn encode_empty_input_and_bad_vocab() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = write(dir.path(), "c.txt", "ab\n");
    let vocab = dir.path().join("v.json");
    assert!(train(&corpus, "text", 6, &vocab).status.success());
    let run = zipfbpe_stdin(&["encode", "--vocab", s(&vocab)], "");
    assert!(run.status.success());
    assert!(run.stdout.is_empty());

    let broken = write(dir.path(), "broken.json", "{\"format_version\": 1");
    let run = zipfbpe_stdin(&["encode", "--vocab", s(&broken)], "ab\n");
    assert_eq!(run.status.code(), Some(2));
}

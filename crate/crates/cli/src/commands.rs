use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde_json::json;
use zipfbpe::zipf::{compression_ratio, fertility, token_frequencies};
use zipfbpe::{
    fit_power_law, load_corpus, rank_frequency, select_vocabulary_with, train_to_size, CorpusMode,
    PretokenCounts, SelectorConfig, Vocabulary,
};

use crate::output::{
    default_manifest_path, load_vocab, write_atomic, CliResult, Failure, RunManifest,
};
use crate::{
    CorpusArgs, DecodeArgs, EncodeArgs, RankfreqArgs, ScoreArgs, ScoredCorpusArgs, SelectArgs,
    TrainArgs,
};

pub fn train(args: TrainArgs) -> CliResult {
    let CorpusArgs {
        corpus,
        mode,
        normalize,
    } = &args.corpus;
    let counts = load_corpus(corpus, *mode, *normalize)?;
    let trained = train_to_size(&counts, args.vocab_size)?;
    if trained.exhausted {
        eprintln!(
            "zipfbpe: corpus ran out of pairs at {} tokens (target {})",
            trained.vocabulary.len(),
            args.vocab_size
        );
    }
    write_atomic(&args.out, trained.vocabulary.to_json().as_bytes())?;

    let mut manifest = RunManifest::new(
        "train",
        corpus,
        json!({
            "mode": mode.to_string(),
            "normalize": normalize.to_string(),
            "vocab_size": args.vocab_size,
            "final_size": trained.vocabulary.len(),
            "exhausted": trained.exhausted,
        }),
    )?;
    manifest.add_output(&args.out);
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| default_manifest_path(&args.out));
    manifest.write(&manifest_path)
}

/// Loads the vocabulary and the corpus in the matching mode.
fn load_pair(
    corpus: &ScoredCorpusArgs,
    vocab_path: &Path,
) -> CliResult<(Vocabulary, PretokenCounts)> {
    let vocab = load_vocab(vocab_path)?;
    let mode = corpus.mode.unwrap_or(vocab.mode());
    if mode != vocab.mode() {
        return Err(zipfbpe::Error::ModeMismatch {
            vocab: vocab.mode(),
            corpus: mode,
        }
        .into());
    }
    let counts = load_corpus(&corpus.corpus, mode, corpus.normalize)?;
    Ok((vocab, counts))
}

pub fn score(args: ScoreArgs) -> CliResult {
    let (vocab, counts) = load_pair(&args.corpus, &args.vocab)?;
    let table = token_frequencies(&vocab, &counts)?;
    let fit = fit_power_law(&rank_frequency(&table)?)?;
    let mut report = fit.report();
    report.push_str(&format!(
        "compression_ratio={:?}\n",
        compression_ratio(&vocab, &counts)?
    ));
    if counts.mode() == CorpusMode::Text {
        report.push_str(&format!("fertility={:?}\n", fertility(&vocab, &counts)?));
    }
    print!("{report}");
    Ok(())
}

pub fn select(args: SelectArgs) -> CliResult {
    let CorpusArgs {
        corpus,
        mode,
        normalize,
    } = &args.corpus;
    let counts = load_corpus(corpus, *mode, *normalize)?;
    let config = SelectorConfig {
        checkpoint_interval: args.interval,
        epsilon: args.epsilon,
        patience: args.patience,
        v_min: args.v_min,
        v_max: args.v_max,
        pick_rule: args.pick_rule,
    };
    std::fs::create_dir_all(&args.out_dir)
        .map_err(|e| Failure::data(format!("cannot create {}: {e}", args.out_dir.display())))?;

    let stdout = io::stdout();
    println!("{}", zipfbpe::CheckpointRecord::CSV_HEADER);
    let result = select_vocabulary_with(&counts, &config, |record| {
        let mut out = stdout.lock();
        let _ = writeln!(out, "{}", record.csv_row());
        let _ = out.flush();
    })?;
    println!("{}", result.summary_row());

    let trace_path = args.out_dir.join("trace.csv");
    let vocab_path = args.out_dir.join("vocab.json");
    write_atomic(&trace_path, result.trace_csv().as_bytes())?;
    write_atomic(&vocab_path, result.selected_vocab.to_json().as_bytes())?;

    let mut manifest = RunManifest::new(
        "select",
        corpus,
        json!({
            "mode": mode.to_string(),
            "normalize": normalize.to_string(),
            "checkpoint_interval": config.checkpoint_interval,
            "epsilon": config.epsilon,
            "patience": config.patience,
            "v_min": config.v_min.to_string(),
            "v_min_resolved": result.v_min,
            "v_max": config.v_max,
            "pick_rule": config.pick_rule.to_string(),
            "stop_reason": result.stop_reason.to_string(),
            "selected_size": result.selected_size,
        }),
    )?;
    manifest.add_output(&trace_path);
    manifest.add_output(&vocab_path);
    manifest.write(&args.out_dir.join("manifest.json"))
}

pub fn rankfreq(args: RankfreqArgs) -> CliResult {
    let (vocab, counts) = load_pair(&args.corpus, &args.vocab)?;
    let table = token_frequencies(&vocab, &counts)?;
    let curve = rank_frequency(&table)?;
    write_atomic(&args.csv, curve.to_csv().as_bytes())?;
    if let Some(svg_path) = &args.svg {
        let fit = fit_power_law(&curve).ok();
        let title = format!(
            "{} ({} tokens)",
            args.corpus
                .corpus
                .file_name()
                .map_or_else(String::new, |n| n.to_string_lossy().into_owned()),
            vocab.len()
        );
        let svg = zipfbpe::plot::loglog_svg(&curve, fit.as_ref(), &title);
        write_atomic(svg_path, svg.as_bytes())?;
    }
    Ok(())
}

fn open_input(path: Option<&Path>) -> CliResult<Box<dyn BufRead>> {
    match path {
        Some(p) => {
            let file = File::open(p)
                .map_err(|e| Failure::data(format!("cannot read {}: {e}", p.display())))?;
            Ok(Box::new(BufReader::new(file)))
        }
        None => Ok(Box::new(BufReader::new(io::stdin()))),
    }
}

fn read_error(e: io::Error) -> Failure {
    Failure::data(format!("cannot read input: {e}"))
}

fn write_error(e: io::Error) -> Failure {
    Failure::data(format!("cannot write output: {e}"))
}

pub fn encode(args: EncodeArgs) -> CliResult {
    let vocab = load_vocab(&args.vocab)?;
    let input = open_input(args.input.as_deref())?;
    let mut out = BufWriter::new(io::stdout().lock());
    for line in input.lines() {
        let line = line.map_err(read_error)?;
        let line = args.normalize.apply(&line);
        let ids = vocab.encode(&line);
        let fields: Vec<String> = if args.show_tokens {
            ids.iter()
                .map(|&id| vocab.token(id).expect("encoded id").to_string())
                .collect()
        } else {
            ids.iter().map(u32::to_string).collect()
        };
        writeln!(out, "{}", fields.join(" ")).map_err(write_error)?;
    }
    out.flush().map_err(write_error)
}

pub fn decode(args: DecodeArgs) -> CliResult {
    let vocab = load_vocab(&args.vocab)?;
    let input = open_input(args.input.as_deref())?;
    let mut out = BufWriter::new(io::stdout().lock());
    for (n, line) in input.lines().enumerate() {
        let line = line.map_err(read_error)?;
        let ids = line
            .split_whitespace()
            .map(str::parse)
            .collect::<Result<Vec<u32>, _>>()
            .map_err(|e| Failure::data(format!("line {}: {e}", n + 1)))?;
        writeln!(out, "{}", vocab.decode(&ids)?).map_err(write_error)?;
    }
    out.flush().map_err(write_error)
}

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zipfbpe::{CorpusMode, Normalization, PickRule, VocabFloor};

/// Train character-level BPE vocabularies and pick their size by Zipf alignment.
#[derive(Parser)]
#[command(name = "zipfbpe", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train a vocabulary of a fixed size.
    Train(TrainArgs),
    /// Report the Zipf fit and compression of a vocabulary on a corpus.
    Score(ScoreArgs),
    /// Grow a vocabulary until its Zipf score stagnates.
    Select(SelectArgs),
    /// Write the rank-frequency table (and optionally a log-log plot).
    Rankfreq(RankfreqArgs),
    /// Tokenize one record per input line into ids.
    Encode(EncodeArgs),
    /// Turn lines of ids back into text.
    Decode(DecodeArgs),
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file (UTF-8).
    #[arg(long)]
    corpus: PathBuf,
    /// `text`: whitespace-separated words; `sequence`: one record per line.
    #[arg(long, default_value = "text")]
    mode: CorpusMode,
    /// Unicode normalization applied before counting: `none` or `nfc`.
    #[arg(long, default_value = "none")]
    normalize: Normalization,
}

/// Corpus arguments whose mode defaults to the vocabulary's.
#[derive(Args)]
struct ScoredCorpusArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Corpus mode; must agree with the vocabulary when given.
    #[arg(long)]
    mode: Option<CorpusMode>,
    #[arg(long, default_value = "none")]
    normalize: Normalization,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Target vocabulary size, reserved tokens included.
    #[arg(long)]
    vocab_size: usize,
    /// Vocabulary JSON output.
    #[arg(long)]
    out: PathBuf,
    /// Run manifest output [default: OUT with extension .manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct ScoreArgs {
    #[command(flatten)]
    corpus: ScoredCorpusArgs,
    #[arg(long)]
    vocab: PathBuf,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Merges between checkpoints.
    #[arg(long, default_value_t = 100)]
    interval: usize,
    /// Minimum score gain that counts as an improvement.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Non-improving checkpoints before stopping.
    #[arg(long, default_value_t = 10)]
    patience: usize,
    /// Size of the first checkpoint: `auto` or a number.
    #[arg(long, default_value = "auto")]
    v_min: VocabFloor,
    #[arg(long, default_value_t = 50_000)]
    v_max: usize,
    /// `current_at_stop` or `best_checkpoint`.
    #[arg(long, default_value = "current_at_stop")]
    pick_rule: PickRule,
    /// Directory receiving trace.csv, vocab.json and manifest.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct RankfreqArgs {
    #[command(flatten)]
    corpus: ScoredCorpusArgs,
    #[arg(long)]
    vocab: PathBuf,
    /// CSV output with columns rank,token,frequency.
    #[arg(long)]
    csv: PathBuf,
    /// Optional SVG log-log plot.
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct EncodeArgs {
    #[arg(long)]
    vocab: PathBuf,
    /// Input file; standard input when omitted.
    input: Option<PathBuf>,
    /// Print token strings instead of ids.
    #[arg(long)]
    show_tokens: bool,
    #[arg(long, default_value = "none")]
    normalize: Normalization,
}

#[derive(Args)]
struct DecodeArgs {
    #[arg(long)]
    vocab: PathBuf,
    /// Input file of space-separated ids; standard input when omitted.
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Train(args) => commands::train(args),
        Command::Score(args) => commands::score(args),
        Command::Select(args) => commands::select(args),
        Command::Rankfreq(args) => commands::rankfreq(args),
        Command::Encode(args) => commands::encode(args),
        Command::Decode(args) => commands::decode(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("zipfbpe: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

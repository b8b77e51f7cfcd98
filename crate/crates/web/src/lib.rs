//! In-browser demo: train a vocabulary on pasted text and inspect its
//! rank-frequency curve, run the stagnation selector, and tokenize input.
//!
//! [`Session`] holds the logic and is usable natively; [`Demo`] is the thin
//! `wasm-bindgen` wrapper the page talks to. Every call returns a JSON
//! document.

use serde::Serialize;
use wasm_bindgen::prelude::*;
use zipfbpe::plot::loglog_svg;
use zipfbpe::zipf::{compression_ratio, fertility, token_frequencies};
use zipfbpe::{
    fit_power_law, rank_frequency, select_vocabulary, train_to_size, CheckpointRecord, CorpusMode,
    PickRule, PretokenCounts, SelectorConfig, Vocabulary, ZipfFit,
};

mod chart;

/// Largest corpus the page accepts, to keep the tab responsive.
pub const MAX_CORPUS_BYTES: usize = 8 << 20;

#[derive(Serialize)]
struct FitJson {
    slope: f64,
    intercept: f64,
    r_squared: f64,
    n_points: usize,
    degenerate: bool,
}

impl From<&ZipfFit> for FitJson {
    fn from(f: &ZipfFit) -> Self {
        FitJson {
            slope: f.slope,
            intercept: f.intercept,
            r_squared: f.r_squared,
            n_points: f.n_points,
            degenerate: f.degenerate,
        }
    }
}

#[derive(Serialize)]
struct CorpusJson {
    mode: String,
    pretokens: usize,
    total_pretokens: u64,
    total_chars: u64,
    alphabet: usize,
    min_vocab: usize,
}

#[derive(Serialize)]
struct TrainJson {
    vocab_size: usize,
    exhausted: bool,
    fit: Option<FitJson>,
    compression_ratio: f64,
    fertility: Option<f64>,
    top_tokens: Vec<(String, u64)>,
    svg: String,
}

#[derive(Serialize)]
struct CheckpointJson {
    index: usize,
    vocab_size: usize,
    zipf_t: f64,
    zipf_max: f64,
    stagnation: usize,
}

impl From<&CheckpointRecord> for CheckpointJson {
    fn from(r: &CheckpointRecord) -> Self {
        CheckpointJson {
            index: r.index,
            vocab_size: r.vocab_size,
            zipf_t: r.zipf_t,
            zipf_max: r.zipf_max,
            stagnation: r.stagnation,
        }
    }
}

#[derive(Serialize)]
struct SelectJson {
    stop_reason: String,
    selected_size: usize,
    best_checkpoint: usize,
    v_min: usize,
    trace: Vec<CheckpointJson>,
    trace_csv: String,
    svg: String,
}

#[derive(Serialize)]
struct EncodeJson {
    ids: Vec<u32>,
    tokens: Vec<String>,
    decoded: String,
    chars: usize,
}

/// Corpus plus the vocabulary most recently trained or selected on it.
pub struct Session {
    counts: PretokenCounts,
    vocab: Vocabulary,
}

impl Session {
    pub fn new(corpus: &str, mode: &str) -> Result<Session, String> {
        if corpus.len() > MAX_CORPUS_BYTES {
            return Err(format!(
                "corpus is {} bytes; the demo accepts up to {MAX_CORPUS_BYTES}",
                corpus.len()
            ));
        }
        let mode: CorpusMode = mode.parse()?;
        let counts = PretokenCounts::from_text(corpus, mode).map_err(|e| e.to_string())?;
        let min = zipfbpe::Trainer::new(&counts).min_vocab_size();
        let vocab = train_to_size(&counts, min)
            .map_err(|e| e.to_string())?
            .vocabulary;
        Ok(Session { counts, vocab })
    }

    pub fn corpus_info(&self) -> String {
        let alphabet = self.vocab.alphabet().len();
        to_json(&CorpusJson {
            mode: self.counts.mode().to_string(),
            pretokens: self.counts.len(),
            total_pretokens: self.counts.total_pretokens(),
            total_chars: self.counts.total_chars(),
            alphabet,
            min_vocab: Vocabulary::min_size(self.counts.mode(), alphabet),
        })
    }

    /// Trains to `vocab_size` and reports the fit and the log-log plot.
    pub fn train(&mut self, vocab_size: usize) -> Result<String, String> {
        let out = train_to_size(&self.counts, vocab_size).map_err(|e| e.to_string())?;
        self.vocab = out.vocabulary;
        let table = token_frequencies(&self.vocab, &self.counts).map_err(|e| e.to_string())?;
        let curve = rank_frequency(&table).map_err(|e| e.to_string())?;
        let fit = fit_power_law(&curve).ok();
        let fertility = match self.counts.mode() {
            CorpusMode::Text => fertility(&self.vocab, &self.counts).ok(),
            CorpusMode::Sequence => None,
        };
        let title = format!("{} tokens", self.vocab.len());
        Ok(to_json(&TrainJson {
            vocab_size: self.vocab.len(),
            exhausted: out.exhausted,
            fit: fit.as_ref().map(FitJson::from),
            compression_ratio: compression_ratio(&self.vocab, &self.counts)
                .map_err(|e| e.to_string())?,
            fertility,
            top_tokens: curve
                .points()
                .iter()
                .take(20)
                .map(|p| (p.token.clone(), p.frequency))
                .collect(),
            svg: loglog_svg(&curve, fit.as_ref(), &title),
        }))
    }

    /// Runs the selector; the selected vocabulary becomes current.
    pub fn select(
        &mut self,
        interval: usize,
        epsilon: f64,
        patience: usize,
        v_max: usize,
        best_checkpoint: bool,
    ) -> Result<String, String> {
        let config = SelectorConfig {
            checkpoint_interval: interval,
            epsilon,
            patience,
            v_max,
            pick_rule: if best_checkpoint {
                PickRule::BestCheckpoint
            } else {
                PickRule::CurrentAtStop
            },
            ..Default::default()
        };
        let result = select_vocabulary(&self.counts, &config).map_err(|e| e.to_string())?;
        let svg = chart::trace_svg(
            &result.trace,
            result.stop_checkpoint(),
            result.best_checkpoint,
        );
        self.vocab = result.selected_vocab.clone();
        Ok(to_json(&SelectJson {
            stop_reason: result.stop_reason.to_string(),
            selected_size: result.selected_size,
            best_checkpoint: result.best_checkpoint,
            v_min: result.v_min,
            trace: result.trace.iter().map(CheckpointJson::from).collect(),
            trace_csv: result.trace_csv(),
            svg,
        }))
    }

    /// Tokenizes `input` with the current vocabulary.
    pub fn encode(&self, input: &str) -> Result<String, String> {
        let ids = self.vocab.encode(input);
        let tokens = ids
            .iter()
            .map(|&id| self.vocab.token(id).unwrap_or_default().to_string())
            .collect();
        let decoded = self.vocab.decode(&ids).map_err(|e| e.to_string())?;
        Ok(to_json(&EncodeJson {
            chars: input.chars().filter(|c| !c.is_whitespace()).count(),
            ids,
            tokens,
            decoded,
        }))
    }

    pub fn vocab_json(&self) -> String {
        self.vocab.to_json()
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("demo payloads serialize")
}

/// Built-in corpora: `zipf` (two-phase word corpus) or `dna`.
pub fn sample(kind: &str, seed: u64) -> Result<String, String> {
    match kind {
        "zipf" => Ok(zipfbpe::synth::two_phase(300, 3000, 3000, seed)),
        "dna" => Ok(zipfbpe::synth::dna_like(200_000, seed)),
        other => Err(format!("unknown sample {other:?}")),
    }
}

#[wasm_bindgen]
pub struct Demo {
    session: Session,
}

#[wasm_bindgen]
impl Demo {
    #[wasm_bindgen(constructor)]
    pub fn new(corpus: &str, mode: &str) -> Result<Demo, JsError> {
        Ok(Demo {
            session: Session::new(corpus, mode).map_err(|e| JsError::new(&e))?,
        })
    }

    #[wasm_bindgen(js_name = corpusInfo)]
    pub fn corpus_info(&self) -> String {
        self.session.corpus_info()
    }

    pub fn train(&mut self, vocab_size: usize) -> Result<String, JsError> {
        self.session.train(vocab_size).map_err(|e| JsError::new(&e))
    }

    pub fn select(
        &mut self,
        interval: usize,
        epsilon: f64,
        patience: usize,
        v_max: usize,
        best_checkpoint: bool,
    ) -> Result<String, JsError> {
        self.session
            .select(interval, epsilon, patience, v_max, best_checkpoint)
            .map_err(|e| JsError::new(&e))
    }

    pub fn encode(&self, input: &str) -> Result<String, JsError> {
        self.session.encode(input).map_err(|e| JsError::new(&e))
    }

    #[wasm_bindgen(js_name = vocabJson)]
    pub fn vocab_json(&self) -> String {
        self.session.vocab_json()
    }
}

#[wasm_bindgen(js_name = sampleCorpus)]
pub fn sample_corpus(kind: &str, seed: u32) -> Result<String, JsError> {
    sample(kind, u64::from(seed)).map_err(|e| JsError::new(&e))
}

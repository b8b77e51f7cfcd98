//! Vocabulary-size selection by Zipf-alignment stagnation.
//!
//! The vocabulary grows in batches of `checkpoint_interval` merges. After
//! each batch the token rank-frequency curve is scored (R² of the log-log
//! fit); growth stops once `patience` consecutive checkpoints fail to beat
//! the best score so far by more than `epsilon`.

use std::fmt;
use std::str::FromStr;

use crate::bpe::{Trainer, Vocabulary};
use crate::corpus::PretokenCounts;
use crate::error::{Error, Result};
use crate::zipf::{fit_histogram, ZipfFit};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PickRule {
    /// The vocabulary in place when growth stopped.
    #[default]
    CurrentAtStop,
    /// The vocabulary of the highest-scoring checkpoint.
    BestCheckpoint,
}

impl fmt::Display for PickRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PickRule::CurrentAtStop => "current_at_stop",
            PickRule::BestCheckpoint => "best_checkpoint",
        })
    }
}

impl FromStr for PickRule {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "current_at_stop" | "current-at-stop" => Ok(PickRule::CurrentAtStop),
            "best_checkpoint" | "best-checkpoint" => Ok(PickRule::BestCheckpoint),
            other => Err(format!(
                "unknown pick rule {other:?} (expected current_at_stop or best_checkpoint)"
            )),
        }
    }
}

/// Size of the first scored checkpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VocabFloor {
    /// Start from the character vocabulary, but skip the initial stretch
    /// where the score falls as merges are added: the first checkpoint is
    /// the one right before the score first stops falling. Character-level
    /// distributions of a few dozen symbols can fit a line well by accident,
    /// and the score dips before the merged vocabulary starts to straighten.
    #[default]
    Auto,
    Fixed(usize),
}

impl fmt::Display for VocabFloor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VocabFloor::Auto => f.write_str("auto"),
            VocabFloor::Fixed(v) => write!(f, "{v}"),
        }
    }
}

impl FromStr for VocabFloor {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(VocabFloor::Auto);
        }
        s.parse()
            .map(VocabFloor::Fixed)
            .map_err(|_| format!("invalid vocabulary floor {s:?} (expected auto or a size)"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectorConfig {
    /// Merges between two scored checkpoints.
    pub checkpoint_interval: usize,
    /// Minimum improvement over the best score that resets stagnation.
    pub epsilon: f64,
    /// Non-improving checkpoints tolerated before stopping.
    pub patience: usize,
    /// Where the trace starts.
    pub v_min: VocabFloor,
    pub v_max: usize,
    pub pick_rule: PickRule,
}

impl Default for SelectorConfig {
    fn default() -> Self {
        SelectorConfig {
            checkpoint_interval: 100,
            epsilon: 1e-4,
            patience: 10,
            v_min: VocabFloor::Auto,
            v_max: 50_000,
            pick_rule: PickRule::CurrentAtStop,
        }
    }
}

impl SelectorConfig {
    /// Checks the config against the smallest possible vocabulary and
    /// returns the effective `(v_min, v_max)`.
    pub fn resolve(&self, min_vocab: usize) -> Result<(usize, usize)> {
        let invalid = |msg: String| Err(Error::InvalidConfig(msg));
        if self.checkpoint_interval == 0 {
            return invalid("checkpoint_interval must be at least 1".into());
        }
        if self.patience == 0 {
            return invalid("patience must be at least 1".into());
        }
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return invalid(format!(
                "epsilon must be finite and >= 0, got {}",
                self.epsilon
            ));
        }
        let v_min = match self.v_min {
            VocabFloor::Auto => min_vocab,
            VocabFloor::Fixed(v) => v,
        };
        if v_min < min_vocab {
            return invalid(format!(
                "v_min {v_min} is below the minimum vocabulary {min_vocab}"
            ));
        }
        if v_min > self.v_max {
            return invalid(format!("v_min {v_min} exceeds v_max {}", self.v_max));
        }
        Ok((v_min, self.v_max))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CheckpointRecord {
    pub index: usize,
    pub vocab_size: usize,
    pub zipf_t: f64,
    pub zipf_max: f64,
    pub stagnation: usize,
}

impl CheckpointRecord {
    pub const CSV_HEADER: &'static str = "checkpoint,vocab_size,zipf_t,zipf_max,stagnation";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:?},{:?},{}",
            self.index, self.vocab_size, self.zipf_t, self.zipf_max, self.stagnation
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    Stagnation,
    MaxSize,
    PairsExhausted,
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StopReason::Stagnation => "stagnation",
            StopReason::MaxSize => "max_size",
            StopReason::PairsExhausted => "pairs_exhausted",
        })
    }
}

#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub trace: Vec<CheckpointRecord>,
    pub stop_reason: StopReason,
    pub pick_rule: PickRule,
    pub selected_size: usize,
    pub selected_vocab: Vocabulary,
    /// Fit of the selected checkpoint, when it had enough tokens.
    pub selected_fit: Option<ZipfFit>,
    /// Vocabulary size of the first checkpoint.
    pub v_min: usize,
    pub best_checkpoint: usize,
}

impl SelectionResult {
    /// Index of the checkpoint where growth stopped.
    pub fn stop_checkpoint(&self) -> usize {
        self.trace.len() - 1
    }

    /// `#`-prefixed summary row closing the trace CSV.
    pub fn summary_row(&self) -> String {
        let mut row = format!(
            "# stop_reason={},selected_size={},best_checkpoint={},pick_rule={},v_min={}",
            self.stop_reason, self.selected_size, self.best_checkpoint, self.pick_rule, self.v_min
        );
        if let Some(fit) = &self.selected_fit {
            row.push_str(&format!(
                ",slope={:?},intercept={:?},r_squared={:?},n_points={},degenerate={}",
                fit.slope, fit.intercept, fit.r_squared, fit.n_points, fit.degenerate
            ));
        }
        row
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from(CheckpointRecord::CSV_HEADER);
        out.push('\n');
        for record in &self.trace {
            out.push_str(&record.csv_row());
            out.push('\n');
        }
        out.push_str(&self.summary_row());
        out.push('\n');
        out
    }
}

/// Running state of the stagnation rule.
#[derive(Debug, Clone, Default)]
pub struct StagnationCounter {
    epsilon: f64,
    checkpoints: usize,
    best: f64,
    best_index: usize,
    stagnation: usize,
}

impl StagnationCounter {
    pub fn new(epsilon: f64) -> Self {
        StagnationCounter {
            epsilon,
            ..Default::default()
        }
    }

    /// Records the next score and returns `(zipf_max, stagnation)`.
    pub fn observe(&mut self, score: f64) -> (f64, usize) {
        let index = self.checkpoints;
        self.checkpoints += 1;
        if index == 0 {
            self.best = score;
            self.best_index = 0;
            self.stagnation = 0;
            return (self.best, 0);
        }
        if score > self.best + self.epsilon {
            self.stagnation = 0;
        } else {
            self.stagnation += 1;
        }
        if score > self.best {
            self.best = score;
            self.best_index = index;
        }
        (self.best, self.stagnation)
    }

    pub fn best_index(&self) -> usize {
        self.best_index
    }
}

/// Replays the stopping rule over a score sequence. Returns the index at
/// which stagnation first reaches `patience` (or the last index) and the
/// earliest index of the maximum score up to that point.
pub fn replay_trace(scores: &[f64], epsilon: f64, patience: usize) -> (usize, usize) {
    let mut counter = StagnationCounter::new(epsilon);
    for (i, &score) in scores.iter().enumerate() {
        let (_, stagnation) = counter.observe(score);
        if stagnation >= patience {
            return (i, counter.best_index());
        }
    }
    (scores.len().saturating_sub(1), counter.best_index())
}

/// Zipf score of the trainer's current token distribution; 0 when fewer
/// than three distinct tokens exist.
pub fn checkpoint_fit(trainer: &Trainer) -> Option<ZipfFit> {
    fit_histogram(trainer.frequency_histogram()).ok()
}

pub fn select_vocabulary(
    counts: &PretokenCounts,
    config: &SelectorConfig,
) -> Result<SelectionResult> {
    select_vocabulary_with(counts, config, |_| {})
}

/// Like [`select_vocabulary`], calling `on_checkpoint` as each checkpoint
/// is scored.
pub fn select_vocabulary_with(
    counts: &PretokenCounts,
    config: &SelectorConfig,
    mut on_checkpoint: impl FnMut(&CheckpointRecord),
) -> Result<SelectionResult> {
    let mut trainer = Trainer::new(counts);
    let min_vocab = trainer.min_vocab_size();
    let (v_min, v_max) = config.resolve(min_vocab)?;
    let mut exhausted = !trainer.grow_to(v_min);

    // Grows by one interval; false when the trainer cannot move.
    let grow = |trainer: &mut Trainer, exhausted: &mut bool| {
        if *exhausted || trainer.vocab_size() >= v_max {
            return false;
        }
        let before = trainer.vocab_size();
        *exhausted = !trainer.grow_to((before + config.checkpoint_interval).min(v_max));
        trainer.vocab_size() > before
    };

    // With an automatic floor, skip the falling head of the score curve:
    // the first checkpoint is the last one before the score stops falling.
    let mut pending = vec![(trainer.vocab_size(), checkpoint_fit(&trainer))];
    if config.v_min == VocabFloor::Auto {
        while grow(&mut trainer, &mut exhausted) {
            let current = (trainer.vocab_size(), checkpoint_fit(&trainer));
            if score(current.1) < score(pending[0].1) {
                pending[0] = current;
            } else {
                pending.push(current);
                break;
            }
        }
    }
    let floor = pending[0].0;

    let mut counter = StagnationCounter::new(config.epsilon);
    let mut trace: Vec<CheckpointRecord> = Vec::new();
    let mut fits: Vec<Option<ZipfFit>> = Vec::new();
    let mut observe = |vocab_size: usize, fit: Option<ZipfFit>| {
        let zipf_t = score(fit);
        let (zipf_max, stagnation) = counter.observe(zipf_t);
        let record = CheckpointRecord {
            index: trace.len(),
            vocab_size,
            zipf_t,
            zipf_max,
            stagnation,
        };
        on_checkpoint(&record);
        trace.push(record);
        fits.push(fit);
        stagnation >= config.patience
    };

    let mut stagnated = false;
    for (size, fit) in pending {
        stagnated = observe(size, fit);
    }
    let stop_reason = loop {
        if stagnated {
            break StopReason::Stagnation;
        }
        if trainer.vocab_size() >= v_max {
            break StopReason::MaxSize;
        }
        if !grow(&mut trainer, &mut exhausted) {
            break StopReason::PairsExhausted;
        }
        stagnated = observe(trainer.vocab_size(), checkpoint_fit(&trainer));
        if exhausted && !stagnated && trainer.vocab_size() < v_max {
            break StopReason::PairsExhausted;
        }
    };

    let best_checkpoint = counter.best_index();
    let selected = match config.pick_rule {
        PickRule::CurrentAtStop => trace.len() - 1,
        PickRule::BestCheckpoint => best_checkpoint,
    };
    let selected_vocab = trainer
        .freeze()
        .truncated(trace[selected].vocab_size - min_vocab);
    Ok(SelectionResult {
        selected_size: selected_vocab.len(),
        selected_fit: fits[selected],
        v_min: floor,
        trace,
        stop_reason,
        pick_rule: config.pick_rule,
        selected_vocab,
        best_checkpoint,
    })
}

fn score(fit: Option<ZipfFit>) -> f64 {
    fit.map_or(0.0, |f| f.r_squared)
}

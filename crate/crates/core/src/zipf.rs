//! Rank-frequency curves and their log-log least-squares fit.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use crate::bpe::Vocabulary;
use crate::corpus::{CorpusMode, PretokenCounts};
use crate::error::{Error, Result};

/// Fewest points a fit accepts; two points always lie on a line.
pub const MIN_FIT_POINTS: usize = 3;

/// Histogram of learned tokens. Never holds reserved tokens or zero counts.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenFrequencyTable {
    counts: BTreeMap<String, u64>,
}

impl TokenFrequencyTable {
    /// Collects `(token, count)` pairs, summing duplicates and dropping zeros.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut table = BTreeMap::new();
        for (token, n) in counts {
            if n > 0 {
                *table.entry(token).or_default() += n;
            }
        }
        TokenFrequencyTable { counts: table }
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    pub fn get(&self, token: &str) -> Option<u64> {
        self.counts.get(token).copied()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn frequencies(&self) -> Vec<u64> {
        self.counts.values().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankedToken {
    pub rank: usize,
    pub token: String,
    pub frequency: u64,
}

/// Tokens by descending frequency, ties in lexicographic token order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankFrequencyCurve {
    points: Vec<RankedToken>,
}

impl RankFrequencyCurve {
    pub fn points(&self) -> &[RankedToken] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// CSV with header `rank,token,frequency`.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["rank", "token", "frequency"])
            .expect("in-memory write");
        for p in &self.points {
            w.write_record([p.rank.to_string(), p.token.clone(), p.frequency.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv of utf-8 is utf-8")
    }
}

pub fn rank_frequency(table: &TokenFrequencyTable) -> Result<RankFrequencyCurve> {
    if table.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut entries: Vec<(&String, u64)> = table.counts.iter().map(|(t, &n)| (t, n)).collect();
    // BTreeMap order already sorts tokens; a stable sort keeps it for ties.
    entries.sort_by_key(|e| std::cmp::Reverse(e.1));
    let points = entries
        .into_iter()
        .enumerate()
        .map(|(i, (token, frequency))| RankedToken {
            rank: i + 1,
            token: token.clone(),
            frequency,
        })
        .collect();
    Ok(RankFrequencyCurve { points })
}

/// Least-squares line through `(log rank, log frequency)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZipfFit {
    /// Fitted exponent, i.e. `-k` in `f ∝ r^-k`.
    pub slope: f64,
    /// Fitted `log C`.
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
    /// All frequencies equal: no variance to explain, `r_squared` is 0.
    pub degenerate: bool,
}

impl ZipfFit {
    /// Flat `key=value` report, one pair per line.
    pub fn report(&self) -> String {
        format!(
            "slope={:?}\nintercept={:?}\nr_squared={:?}\nn_points={}\ndegenerate={}\n",
            self.slope, self.intercept, self.r_squared, self.n_points, self.degenerate
        )
    }
}

impl fmt::Display for ZipfFit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "slope={:.4} intercept={:.4} r2={:.6} n={}",
            self.slope, self.intercept, self.r_squared, self.n_points
        )
    }
}

pub fn fit_power_law(curve: &RankFrequencyCurve) -> Result<ZipfFit> {
    fit_runs(&run_lengths(curve.points.iter().map(|p| p.frequency)))
}

/// Fits arbitrary positive `(rank, frequency)` points with logs in `base`.
pub fn fit_points(points: impl IntoIterator<Item = (f64, f64)>, base: f64) -> Result<ZipfFit> {
    let ln_base = base.ln();
    let (xs, ys): (Vec<f64>, Vec<f64>) = points
        .into_iter()
        .map(|(r, f)| (r.ln() / ln_base, f.ln() / ln_base))
        .unzip();
    fit_xy(&xs, &ys)
}

/// Fit of a frequency list, ranked internally; the order of `freqs` is
/// irrelevant.
pub fn fit_frequencies(freqs: &[u64]) -> Result<ZipfFit> {
    fit_runs(&run_lengths(sort_descending(freqs).into_iter()))
}

/// Fit of a histogram mapping each frequency to the number of tokens
/// observed that many times.
pub fn fit_histogram(histogram: &BTreeMap<u64, u64>) -> Result<ZipfFit> {
    let runs: Vec<(u64, u64)> = histogram
        .iter()
        .rev()
        .filter(|&(&f, &m)| f > 0 && m > 0)
        .map(|(&f, &m)| (f, m))
        .collect();
    fit_runs(&runs)
}

/// Counting sort for the small values that dominate token histograms.
fn sort_descending(freqs: &[u64]) -> Vec<u64> {
    const SMALL: usize = 4096;
    let mut small = vec![0u32; SMALL];
    let mut large = Vec::new();
    for &f in freqs {
        match small.get_mut(f as usize) {
            Some(n) => *n += 1,
            None => large.push(f),
        }
    }
    large.sort_unstable_by(|a, b| b.cmp(a));
    let mut out = large;
    out.reserve(freqs.len() - out.len());
    for (f, &n) in small.iter().enumerate().rev() {
        out.extend(std::iter::repeat_n(f as u64, n as usize));
    }
    out
}

/// Collapses a descending frequency sequence into `(frequency, count)` runs.
fn run_lengths(sorted: impl Iterator<Item = u64>) -> Vec<(u64, u64)> {
    let mut runs: Vec<(u64, u64)> = Vec::new();
    for f in sorted {
        match runs.last_mut() {
            Some((g, m)) if *g == f => *m += 1,
            _ => runs.push((f, 1)),
        }
    }
    runs
}

thread_local! {
    /// Prefix sums of `ln r` and `(ln r)^2` over ranks, grown on demand.
    static RANK_SUMS: RefCell<RankSums> = const { RefCell::new(RankSums::new()) };
}

struct RankSums {
    s1: Vec<f64>,
    s2: Vec<f64>,
    // Compensated running totals, so long prefixes stay accurate.
    acc1: (f64, f64),
    acc2: (f64, f64),
}

impl RankSums {
    const fn new() -> Self {
        RankSums {
            s1: Vec::new(),
            s2: Vec::new(),
            acc1: (0.0, 0.0),
            acc2: (0.0, 0.0),
        }
    }

    fn ensure(&mut self, n: usize) {
        if self.s1.is_empty() {
            self.s1.push(0.0);
            self.s2.push(0.0);
        }
        for r in self.s1.len()..=n {
            let x = (r as f64).ln();
            self.s1.push(neumaier(&mut self.acc1, x));
            self.s2.push(neumaier(&mut self.acc2, x * x));
        }
    }
}

fn neumaier(acc: &mut (f64, f64), x: f64) -> f64 {
    let (sum, comp) = acc;
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *comp += (*sum - t) + x;
    } else {
        *comp += (x - t) + *sum;
    }
    *sum = t;
    *sum + *comp
}

/// Natural-log fit of frequencies given as runs `(frequency, tokens)` in
/// strictly descending frequency order; a run of `m` tokens occupies `m`
/// consecutive ranks.
fn fit_runs(runs: &[(u64, u64)]) -> Result<ZipfFit> {
    let n: u64 = runs.iter().map(|r| r.1).sum();
    let n = n as usize;
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: n,
        });
    }
    let nf = n as f64;
    let ys: Vec<f64> = runs.iter().map(|&(f, _)| (f as f64).ln()).collect();
    let y_mean = runs
        .iter()
        .zip(&ys)
        .map(|(r, y)| r.1 as f64 * y)
        .sum::<f64>()
        / nf;
    if runs.len() == 1 {
        return Ok(ZipfFit {
            slope: 0.0,
            intercept: y_mean,
            r_squared: 0.0,
            n_points: n,
            degenerate: true,
        });
    }
    RANK_SUMS.with(|sums| {
        let mut sums = sums.borrow_mut();
        sums.ensure(n);
        let x_mean = sums.s1[n] / nf;
        let sxx = sums.s2[n] - sums.s1[n] * x_mean;
        let (mut sxy, mut syy) = (0.0, 0.0);
        let mut rank = 0;
        for (&(_, m), &y) in runs.iter().zip(&ys) {
            let dy = y - y_mean;
            let end = rank + m as usize;
            sxy += dy * (sums.s1[end] - sums.s1[rank]);
            syy += m as f64 * dy * dy;
            rank = end;
        }
        let slope = sxy / sxx;
        Ok(ZipfFit {
            slope,
            intercept: y_mean - slope * x_mean,
            r_squared: (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0),
            n_points: n,
            degenerate: false,
        })
    })
}

fn fit_xy(xs: &[f64], ys: &[f64]) -> Result<ZipfFit> {
    let n = xs.len();
    if n < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            needed: MIN_FIT_POINTS,
            got: n,
        });
    }
    let nf = n as f64;
    let x_mean = xs.iter().sum::<f64>() / nf;
    let y_mean = ys.iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (&x, &y) in xs.iter().zip(ys) {
        let dx = x - x_mean;
        let dy = y - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    let constant = |v: &[f64]| v.iter().all(|&a| a == v[0]);
    if constant(ys) || constant(xs) {
        return Ok(ZipfFit {
            slope: 0.0,
            intercept: y_mean,
            r_squared: 0.0,
            n_points: n,
            degenerate: true,
        });
    }
    let slope = sxy / sxx;
    let intercept = y_mean - slope * x_mean;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(&x, &y)| {
            let e = y - (intercept + slope * x);
            e * e
        })
        .sum();
    Ok(ZipfFit {
        slope,
        intercept,
        r_squared: (1.0 - ss_res / syy).clamp(0.0, 1.0),
        n_points: n,
        degenerate: false,
    })
}

/// R² of the log-log rank-frequency fit.
pub fn zipf_score(table: &TokenFrequencyTable) -> Result<f64> {
    fit_power_law(&rank_frequency(table)?).map(|f| f.r_squared)
}

/// Histogram of the corpus re-tokenized with a frozen vocabulary.
pub fn token_frequencies(
    vocab: &Vocabulary,
    counts: &PretokenCounts,
) -> Result<TokenFrequencyTable> {
    check_mode(vocab, counts)?;
    let per_token: BTreeMap<u32, u64> = counts
        .entries()
        .par_iter()
        .fold(BTreeMap::new, |mut acc, (pretoken, &n)| {
            for id in vocab.encode_pretoken(pretoken) {
                *acc.entry(id).or_default() += n;
            }
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_default() += v;
            }
            a
        });
    Ok(TokenFrequencyTable::from_counts(
        per_token
            .into_iter()
            .filter(|&(id, _)| !vocab.is_reserved(id))
            .map(|(id, n)| (vocab.token(id).expect("encoded id").to_string(), n)),
    ))
}

/// Corpus characters per emitted token.
pub fn compression_ratio(vocab: &Vocabulary, counts: &PretokenCounts) -> Result<f64> {
    let tokens = emitted_tokens(vocab, counts)?;
    Ok(counts.total_chars() as f64 / tokens as f64)
}

/// Emitted tokens per word; text mode only.
pub fn fertility(vocab: &Vocabulary, counts: &PretokenCounts) -> Result<f64> {
    if counts.mode() != CorpusMode::Text {
        return Err(Error::UnsupportedMode("fertility"));
    }
    let tokens = emitted_tokens(vocab, counts)?;
    Ok(tokens as f64 / counts.total_pretokens() as f64)
}

fn emitted_tokens(vocab: &Vocabulary, counts: &PretokenCounts) -> Result<u64> {
    check_mode(vocab, counts)?;
    if counts.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    Ok(counts
        .entries()
        .par_iter()
        .map(|(p, &n)| vocab.encode_pretoken(p).len() as u64 * n)
        .sum())
}

fn check_mode(vocab: &Vocabulary, counts: &PretokenCounts) -> Result<()> {
    if vocab.mode() != counts.mode() {
        return Err(Error::ModeMismatch {
            vocab: vocab.mode(),
            corpus: counts.mode(),
        });
    }
    Ok(())
}

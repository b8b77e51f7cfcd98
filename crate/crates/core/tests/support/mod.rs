//! Reference implementations used as test oracles.

#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;

pub const MARKER: char = '\u{2581}';

/// Result of [`naive_bpe`]: merges as `(left, right)` plus the final
/// token histogram.
pub struct NaiveRun {
    pub merges: Vec<(String, String)>,
    pub token_counts: BTreeMap<String, u64>,
}

/// Textbook BPE: recount every adjacent pair from scratch before each merge.
pub fn naive_bpe(words: &BTreeMap<String, u64>, text_mode: bool, max_merges: usize) -> NaiveRun {
    let mut segs: Vec<(Vec<String>, u64)> = words
        .iter()
        .map(|(w, &n)| {
            let mut s: Vec<String> = w.chars().map(|c| c.to_string()).collect();
            if text_mode {
                s.last_mut().unwrap().push(MARKER);
            }
            (s, n)
        })
        .collect();
    let mut merges = Vec::new();
    while merges.len() < max_merges {
        let mut pairs: BTreeMap<(String, String), u64> = BTreeMap::new();
        for (s, n) in &segs {
            for w in s.windows(2) {
                *pairs.entry((w[0].clone(), w[1].clone())).or_default() += n;
            }
        }
        // BTreeMap iterates in lexicographic order, so the first maximum wins ties.
        let mut best: Option<(&(String, String), u64)> = None;
        for (p, &n) in &pairs {
            if best.is_none_or(|(_, b)| n > b) {
                best = Some((p, n));
            }
        }
        let Some(((l, r), _)) = best else { break };
        let (l, r) = (l.clone(), r.clone());
        for (s, _) in &mut segs {
            let mut out = Vec::with_capacity(s.len());
            let mut i = 0;
            while i < s.len() {
                if i + 1 < s.len() && s[i] == l && s[i + 1] == r {
                    out.push(format!("{l}{r}"));
                    i += 2;
                } else {
                    out.push(s[i].clone());
                    i += 1;
                }
            }
            *s = out;
        }
        merges.push((l, r));
    }
    let mut token_counts = BTreeMap::new();
    for (s, n) in &segs {
        for t in s {
            *token_counts.entry(t.clone()).or_default() += n;
        }
    }
    NaiveRun {
        merges,
        token_counts,
    }
}

/// OLS through the normal equations, solved with Cramer's rule on raw
/// (uncentered) sums.
pub fn normal_equation_fit(freqs_by_rank: &[f64]) -> (f64, f64, f64) {
    let n = freqs_by_rank.len() as f64;
    let xs: Vec<f64> = (1..=freqs_by_rank.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = freqs_by_rank.iter().map(|f| f.ln()).collect();
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| x * y).sum();
    let det = n * sxx - sx * sx;
    let slope = (n * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    let mean = sy / n;
    let ss_tot: f64 = ys.iter().map(|y| (y - mean).powi(2)).sum();
    let ss_res: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    (slope, intercept, 1.0 - ss_res / ss_tot)
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
    }
}

/// Small corpora over an alphabet of up to eight letters.
pub fn small_corpus() -> impl Strategy<Value = BTreeMap<String, u64>> {
    (1usize..=8).prop_flat_map(|alpha| {
        let word = proptest::collection::vec(0..alpha as u8, 1..8).prop_map(|v| {
            v.into_iter()
                .map(|b| (b'a' + b) as char)
                .collect::<String>()
        });
        proptest::collection::btree_map(word, 1u64..6, 1..=50)
    })
}

/// Strictly non-increasing frequency vectors with at least two distinct values.
pub fn frequency_curve() -> impl Strategy<Value = Vec<u64>> {
    proptest::collection::vec(1u64..100_000, 3..300)
        .prop_map(|mut v| {
            v.sort_unstable_by(|a, b| b.cmp(a));
            v
        })
        .prop_filter("not flat", |v| v.first() != v.last())
}

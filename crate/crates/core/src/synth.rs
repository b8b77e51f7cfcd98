//! Seeded synthetic corpora for tests, benchmarks and the demo page.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BASES: [char; 4] = ['A', 'C', 'G', 'T'];

/// DNA-like records (one per line) of at least `bytes` total size.
///
/// Bases come from an order-3 Markov chain with skewed transition
/// probabilities; a fraction of every record is copied from a small library
/// of repeated motifs, mimicking the repeat content of real genomes.
pub fn dna_like(bytes: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let contexts = 64;
    let transitions: Vec<WeightedIndex<f64>> = (0..contexts)
        .map(|_| {
            let w: Vec<f64> = (0..4).map(|_| rng.gen::<f64>().powi(2) + 0.05).collect();
            WeightedIndex::new(w).expect("positive weights")
        })
        .collect();
    let markov = |rng: &mut ChaCha8Rng, len: usize, out: &mut Vec<u8>| {
        for _ in 0..len {
            let n = out.len();
            let ctx = if n >= 3 {
                out[n - 3..]
                    .iter()
                    .fold(0, |acc, &b| acc * 4 + base_index(b))
            } else {
                0
            };
            out.push(BASES[transitions[ctx].sample(rng)] as u8);
        }
    };

    let motifs: Vec<Vec<u8>> = (0..400)
        .map(|_| {
            let len = span(&mut rng, 6, 24);
            let mut m = Vec::with_capacity(len);
            markov(&mut rng, len, &mut m);
            m
        })
        .collect();
    let motif_weights =
        WeightedIndex::new((1..=motifs.len()).map(|r| 1.0 / r as f64)).expect("positive weights");

    let mut out = String::with_capacity(bytes + 512);
    let mut record = Vec::new();
    while out.len() < bytes {
        record.clear();
        let len = span(&mut rng, 80, 240);
        while record.len() < len {
            if rng.gen_bool(0.3) {
                record.extend_from_slice(&motifs[motif_weights.sample(&mut rng)]);
            } else {
                let run = span(&mut rng, 4, 16);
                markov(&mut rng, run, &mut record);
            }
        }
        record.truncate(len);
        out.push_str(std::str::from_utf8(&record).expect("ascii"));
        out.push('\n');
    }
    out
}

/// Uniform draw from `lo..hi`. Sampling through `u64` keeps seeded output
/// identical on 32- and 64-bit targets.
fn span(rng: &mut ChaCha8Rng, lo: usize, hi: usize) -> usize {
    rng.gen_range(lo as u64..hi as u64) as usize
}

fn base_index(b: u8) -> usize {
    match b {
        b'A' => 0,
        b'C' => 1,
        b'G' => 2,
        _ => 3,
    }
}

/// Sequence-mode corpus whose character frequencies are exactly
/// `60 / rank` for ranks 1..=6, a perfect power law.
pub fn power_law_chars() -> String {
    let mut out = String::new();
    for (rank, c) in "abcdef".chars().enumerate() {
        for _ in 0..60 / (rank + 1) {
            out.push(c);
            out.push('\n');
        }
    }
    out
}

/// Sequence-mode corpus with `n` equally frequent characters.
pub fn uniform_chars(n: usize, repeats: usize) -> String {
    let mut out = String::new();
    for c in ('a'..='z').take(n) {
        for _ in 0..repeats {
            out.push(c);
            out.push('\n');
        }
    }
    out
}

/// Text corpus with a two-phase Zipf score: a core of `words` distinct
/// words with counts `top / rank` (so their word-level histogram is a
/// near-exact power law) plus `hapaxes` single-occurrence words over a
/// disjoint alphabet.
///
/// While merges assemble the core words the score climbs towards the
/// word-level fit; once they are whole tokens the remaining merges only
/// combine count-1 pieces of the hapaxes, which barely moves the curve,
/// so the score plateaus.
pub fn two_phase(words: usize, top: u64, hapaxes: usize, seed: u64) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let core_letters: Vec<char> = ('a'..='p').collect();
    let noise_letters: Vec<char> = ('A'..='Z').collect();
    let mut vocab = std::collections::BTreeSet::new();
    while vocab.len() < words {
        let len = span(&mut rng, 3, 9);
        let w: String = (0..len)
            .map(|_| core_letters[span(&mut rng, 0, core_letters.len())])
            .collect();
        vocab.insert(w);
    }
    let mut vocab: Vec<String> = vocab.into_iter().collect();
    // Shuffle so rank is independent of spelling.
    for i in (1..vocab.len()).rev() {
        let j = span(&mut rng, 0, i + 1);
        vocab.swap(i, j);
    }
    let mut tokens: Vec<String> = Vec::new();
    for (rank, w) in vocab.iter().enumerate() {
        let n = (top / (rank as u64 + 1)).max(1);
        tokens.extend(std::iter::repeat_n(w.clone(), n as usize));
    }
    let mut seen = std::collections::BTreeSet::new();
    while seen.len() < hapaxes {
        let len = span(&mut rng, 8, 14);
        let w: String = (0..len)
            .map(|_| noise_letters[span(&mut rng, 0, noise_letters.len())])
            .collect();
        if seen.insert(w.clone()) {
            tokens.push(w);
        }
    }
    for i in (1..tokens.len()).rev() {
        let j = span(&mut rng, 0, i + 1);
        tokens.swap(i, j);
    }
    let mut out = String::new();
    for line in tokens.chunks(12) {
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

mod support;

use proptest::prelude::*;
use support::{frequency_curve, normal_equation_fit, rel_err};
use zipfbpe::zipf::{fit_frequencies, fit_points};
use zipfbpe::{fit_power_law, rank_frequency, TokenFrequencyTable};

fn table_of(freqs: &[u64]) -> TokenFrequencyTable {
    TokenFrequencyTable::from_counts(
        freqs
            .iter()
            .enumerate()
            .map(|(i, &f)| (format!("t{i:04}"), f)),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn ols_matches_normal_equations(freqs in frequency_curve()) {
        let fit = fit_power_law(&rank_frequency(&table_of(&freqs)).unwrap()).unwrap();
        let as_f64: Vec<f64> = freqs.iter().map(|&f| f as f64).collect();
        let (slope, intercept, r2) = normal_equation_fit(&as_f64);
        prop_assert!(rel_err(fit.slope, slope) < 1e-9, "{} vs {}", fit.slope, slope);
        prop_assert!(rel_err(fit.intercept, intercept) < 1e-9, "{} vs {}", fit.intercept, intercept);
        prop_assert!(rel_err(fit.r_squared, r2.clamp(0.0, 1.0)) < 1e-9, "{} vs {}", fit.r_squared, r2);
        prop_assert_eq!(fit.n_points, freqs.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn r_squared_ignores_log_base(freqs in frequency_curve(), base in 1.1f64..100.0) {
        let pts = || freqs.iter().enumerate().map(|(i, &f)| ((i + 1) as f64, f as f64));
        let natural = fit_points(pts(), std::f64::consts::E).unwrap();
        let other = fit_points(pts(), base).unwrap();
        prop_assert!((natural.r_squared - other.r_squared).abs() < 1e-12);
        prop_assert!(rel_err(natural.slope, other.slope) < 1e-9);
    }

    #[test]
    fn r_squared_ignores_scaling(freqs in frequency_curve(), scale in 1u64..1000) {
        let scaled: Vec<u64> = freqs.iter().map(|f| f * scale).collect();
        let a = fit_frequencies(&freqs).unwrap();
        let b = fit_frequencies(&scaled).unwrap();
        prop_assert!((a.r_squared - b.r_squared).abs() < 1e-12);
        prop_assert!(rel_err(a.slope, b.slope) < 1e-9);
    }

    #[test]
    fn ranking_is_independent_of_insertion_order(freqs in proptest::collection::vec(1u64..5, 1..60)) {
        let forward = table_of(&freqs);
        let reversed = TokenFrequencyTable::from_counts(
            freqs.iter().enumerate().rev().map(|(i, &f)| (format!("t{i:04}"), f)),
        );
        let a = rank_frequency(&forward).unwrap();
        prop_assert_eq!(&a, &rank_frequency(&reversed).unwrap());
        for w in a.points().windows(2) {
            prop_assert!(w[0].frequency > w[1].frequency
                || (w[0].frequency == w[1].frequency && w[0].token < w[1].token));
        }
    }
}

#[test]
fn exact_power_laws_fit_perfectly() {
    for k in [0.5, 1.0, 1.7, 2.3] {
        let pts = (1..=500).map(|r| (r as f64, 1e6 * (r as f64).powf(-k)));
        let fit = fit_points(pts, std::f64::consts::E).unwrap();
        assert!(
            (fit.r_squared - 1.0).abs() < 1e-12,
            "k={k}: {}",
            fit.r_squared
        );
        assert!((fit.slope + k).abs() < 1e-9);
    }
}

#[test]
fn uniform_curves_are_degenerate() {
    let fit = fit_frequencies(&[7; 40]).unwrap();
    assert!(fit.degenerate);
    assert_eq!(fit.r_squared, 0.0);
    assert_eq!(fit.slope, 0.0);
}

//! Synthetic dataset generators for tests, benchmarks and the CLI bench
//! subcommand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dataset::{validate_binary_isometric, LabeledDataset, TimeSeries, ValidatedDataset};

/// Balanced binary dataset where the positive class carries a tall bump at
/// a fixed position. A single fixed-distance feature at the bump window
/// separates the classes perfectly.
pub fn planted_dataset(n: usize, m: usize, seed: u64) -> ValidatedDataset {
    assert!(n >= 2 && m >= 6);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bump_at = m / 3;
    let mut series = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 1;
        let mut values: Vec<f64> = (0..m).map(|_| rng.gen_range(-0.3..0.3)).collect();
        if positive {
            for v in values.iter_mut().skip(bump_at).take(3) {
                *v += 3.0;
            }
        }
        series.push(TimeSeries::new(values).expect("non-empty"));
        labels.push(if positive { "pos".to_string() } else { "neg".to_string() });
    }
    let d = LabeledDataset::new(series, labels)
        .expect("well-formed")
        .with_name(format!("planted-{n}x{m}"));
    validate_binary_isometric(d).expect("synthetic data is valid")
}

/// Balanced binary dataset of random walks with a small class-dependent
/// drift. Used for timing runs where structure matters less than scale.
pub fn random_walk_dataset(n: usize, m: usize, seed: u64) -> ValidatedDataset {
    assert!(n >= 2 && m >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut series = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        let positive = i % 2 == 1;
        let drift = if positive { 0.02 } else { -0.02 };
        let mut level = 0.0;
        let values: Vec<f64> = (0..m)
            .map(|_| {
                level += rng.gen_range(-1.0..1.0) + drift;
                level
            })
            .collect();
        series.push(TimeSeries::new(values).expect("non-empty"));
        labels.push(if positive { "up".to_string() } else { "down".to_string() });
    }
    let d = LabeledDataset::new(series, labels)
        .expect("well-formed")
        .with_name(format!("walk-{n}x{m}"));
    validate_binary_isometric(d).expect("synthetic data is valid")
}

//! Bundled configurations and seeded random corpora used by the check suite.

use rand::Rng;

use crate::error::Result;
use crate::geometry::{random_unit_vector, ChargeConfiguration};
use crate::rng::{block_rng, purpose};

macro_rules! fixtures {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../corpus/", $name, ".json")))),*]
    };
}

const FIXTURES: &[(&str, &str)] = fixtures![
    "uniform_01",
    "uniform_02",
    "uniform_03",
    "uniform_04",
    "uniform_05",
    "uniform_06",
    "uniform_08",
    "uniform_10",
    "uniform_12",
    "uniform_16",
    "weighted_arc_1",
    "weighted_arc_2",
    "weighted_arc_3",
    "weighted_arc_4",
    "fibonacci_04",
    "fibonacci_08",
    "fibonacci_12",
    "interior_center",
    "interior_half",
    "interior_mixed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntry {
    pub name: &'static str,
    pub config: ChargeConfiguration,
}

/// The configurations shipped with the crate.
pub fn bundled() -> Result<Vec<CorpusEntry>> {
    FIXTURES
        .iter()
        .map(|(name, text)| {
            Ok(CorpusEntry {
                name,
                config: ChargeConfiguration::from_json(text)?,
            })
        })
        .collect()
}

/// Weights drawn log-uniformly from `[0.1, 10]`.
pub fn log_uniform_weights<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let (lo, hi) = (0.1f64.ln(), 10f64.ln());
    (0..n).map(|_| (lo + rng.gen::<f64>() * (hi - lo)).exp()).collect()
}

/// `count` boundary configurations with `d ∈ {2, 3}`, `1 ≤ n ≤ max_n`,
/// uniform positions and log-uniform weights. Item `i` depends only on
/// `(seed, i)`.
pub fn random_weighted_configs(seed: u64, count: usize, max_n: usize) -> Result<Vec<ChargeConfiguration>> {
    (0..count)
        .map(|i| {
            let mut rng = block_rng(seed, purpose::CORPUS, i as u32);
            let d = if rng.gen::<bool>() { 2 } else { 3 };
            let n = rng.gen_range(1..=max_n);
            let weights = log_uniform_weights(&mut rng, n);
            let charges = weights
                .into_iter()
                .map(|w| (random_unit_vector(&mut rng, d), w))
                .collect();
            ChargeConfiguration::new(d, charges)
        })
        .collect()
}

//! Fixed inputs shared by the benchmarks.

use qpairs::{pairs, CharSumConfig, CountConfig, QuadricPair, Result, WeightFunction};

/// A non-diagonal ternary pair, so the character sums take the enumeration route.
pub fn dense_ternary() -> QuadricPair {
    qpairs::forms::validate_pair(
        vec![vec![1, 1, 0], vec![1, -2, 1], vec![0, 1, 3]],
        vec![vec![2, 0, 1], vec![0, 1, 0], vec![1, 0, -1]],
    )
    .expect("bench pair validates")
}

pub fn n3_weight() -> Result<WeightFunction> {
    pairs::n3_weight()
}

pub fn charsum_config() -> CharSumConfig {
    CharSumConfig { budget: 1e9 }
}

pub fn count_config() -> CountConfig {
    CountConfig::default()
}

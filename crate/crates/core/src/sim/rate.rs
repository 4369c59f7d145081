//! Rate proxies for quantized levels.

use std::collections::BTreeMap;

/// Length in bits of the signed order-0 exp-Golomb code for `level`.
///
/// Levels map to code numbers as `v > 0 -> 2v - 1`, `v <= 0 -> -2v`.
pub fn signed_exp_golomb_len(level: i64) -> u64 {
    let magnitude = u128::from(level.unsigned_abs());
    let code = if level > 0 { 2 * magnitude - 1 } else { 2 * magnitude };
    let bits = 128 - (code + 1).leading_zeros() as u64 - 1;
    2 * bits + 1
}

/// Total signed exp-Golomb length of a level sequence.
pub fn rate_estimate<I: IntoIterator<Item = i64>>(levels: I) -> u64 {
    levels.into_iter().map(signed_exp_golomb_len).sum()
}

/// Order-0 Shannon information of a level histogram, in bits: `n · H`.
pub fn histogram_entropy_bits(histogram: &BTreeMap<i64, u64>) -> f64 {
    let total: u64 = histogram.values().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    histogram
        .values()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let c = c as f64;
            -c * (c / n).log2()
        })
        .sum()
}

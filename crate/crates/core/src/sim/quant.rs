//! Uniform reconstruction scalar quantizer.

/// `sign(c) · floor(|c| / qstep + theta)`.
pub fn quantize(coef: f64, qstep: f64, theta: f64) -> i64 {
    let magnitude = (coef.abs() / qstep + theta).floor() as i64;
    if coef < 0.0 {
        -magnitude
    } else {
        magnitude
    }
}

pub fn dequantize(level: i64, qstep: f64) -> f64 {
    level as f64 * qstep
}

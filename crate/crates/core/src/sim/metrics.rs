//! Distortion metrics.

use crate::block::Plane;
use crate::error::{Error, Result};
use crate::jnd::BitDepth;

/// Sum of squared sample differences.
pub fn sse(reference: &Plane, test: &Plane) -> Result<u64> {
    if (reference.width(), reference.height()) != (test.width(), test.height()) {
        return Err(Error::Dimensions(format!(
            "reference is {}x{}, test is {}x{}",
            reference.width(),
            reference.height(),
            test.width(),
            test.height()
        )));
    }
    Ok(reference
        .data()
        .iter()
        .zip(test.data())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum())
}

/// PSNR from an accumulated squared error; `+inf` when the error is zero.
pub fn psnr_from_sse(sse: u64, samples: u64, bit_depth: BitDepth) -> f64 {
    if sse == 0 {
        return f64::INFINITY;
    }
    let peak = f64::from(bit_depth.max_sample());
    let mse = sse as f64 / samples as f64;
    10.0 * (peak * peak / mse).log10()
}

/// `10 · log10((2^b - 1)² / MSE)`, `+inf` for identical planes.
pub fn psnr(reference: &Plane, test: &Plane, bit_depth: BitDepth) -> Result<f64> {
    let err = sse(reference, test)?;
    Ok(psnr_from_sse(err, reference.data().len() as u64, bit_depth))
}

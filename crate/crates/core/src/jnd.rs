//! Luminance and chrominance visibility thresholds.
//!
//! Both thresholds are multipliers applied to a quantization step size. They
//! are evaluated on the mean sample value of a coding block and never drop
//! below 1, so a block is never quantized more finely than the base QP.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sample bit depth. Only the depths common in raw 4:4:4 material are accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct BitDepth(u32);

impl BitDepth {
    pub const EIGHT: BitDepth = BitDepth(8);
    pub const TEN: BitDepth = BitDepth(10);

    pub fn new(bits: u32) -> Result<Self> {
        match bits {
            8 | 10 | 12 | 16 => Ok(BitDepth(bits)),
            other => Err(Error::BitDepth(other)),
        }
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    /// Largest representable sample, `2^b - 1`.
    pub fn max_sample(self) -> u32 {
        (1u32 << self.0) - 1
    }

    /// `2^b` as a real.
    pub fn range(self) -> f64 {
        (1u64 << self.0) as f64
    }

    /// Bytes per sample in a raw planar container.
    pub fn bytes_per_sample(self) -> usize {
        if self.0 == 8 {
            1
        } else {
            2
        }
    }
}

impl TryFrom<u32> for BitDepth {
    type Error = Error;

    fn try_from(bits: u32) -> Result<Self> {
        BitDepth::new(bits)
    }
}

impl From<BitDepth> for u32 {
    fn from(b: BitDepth) -> u32 {
        b.0
    }
}

/// Shape constants of the two threshold functions.
///
/// `a, c, d, f` shape the luma parabola, `g, h, j, k` the chroma
/// piecewise-linear curve. `h` and `j` are sample-value breakpoints expressed
/// at 8 bits; by default they are used literally at every bit depth, and
/// `scale_breakpoints` multiplies them by `2^(b-8)` instead.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MaskingParams {
    pub a: f64,
    pub c: f64,
    pub d: f64,
    pub f: f64,
    pub g: f64,
    pub h: f64,
    pub j: f64,
    pub k: f64,
    #[serde(default)]
    pub scale_breakpoints: bool,
}

impl Default for MaskingParams {
    fn default() -> Self {
        MaskingParams { a: 2.0, c: 0.8, d: 3.0, f: 2.0, g: 3.0, h: 85.0, j: 90.0, k: 3.0, scale_breakpoints: false }
    }
}

impl MaskingParams {
    pub fn validate(&self) -> Result<()> {
        let all = [self.a, self.c, self.d, self.f, self.g, self.h, self.j, self.k];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Params("all parameters must be finite".into()));
        }
        if self.a <= 0.0 || self.c <= 0.0 {
            return Err(Error::Params(format!("a and c must be positive (a={}, c={})", self.a, self.c)));
        }
        if self.d <= 0.0 || self.f <= 0.0 {
            return Err(Error::Params(format!("d and f must be positive (d={}, f={})", self.d, self.f)));
        }
        if self.g < 1.0 || self.k < 1.0 {
            return Err(Error::Params(format!("g and k must be at least 1 (g={}, k={})", self.g, self.k)));
        }
        if !(0.0 < self.h && self.h < self.j) {
            return Err(Error::Params(format!("breakpoints must satisfy 0 < h < j (h={}, j={})", self.h, self.j)));
        }
        Ok(())
    }

    /// Chroma breakpoints `(h, j)` in sample units for the given bit depth.
    pub fn breakpoints(&self, bit_depth: BitDepth) -> (f64, f64) {
        if self.scale_breakpoints {
            let scale = (bit_depth.range()) / 256.0;
            (self.h * scale, self.j * scale)
        } else {
            (self.h, self.j)
        }
    }

    /// Applies `name=value` overrides, e.g. `"g=4,k=2"`.
    pub fn with_overrides(mut self, spec: &str) -> Result<Self> {
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::Params(format!("expected name=value, got '{item}'")))?;
            let key = key.trim();
            let value = value.trim();
            if key == "scale_breakpoints" {
                self.scale_breakpoints = value
                    .parse()
                    .map_err(|_| Error::Params(format!("scale_breakpoints must be true or false, got '{value}'")))?;
                continue;
            }
            let v: f64 = value.parse().map_err(|_| Error::Params(format!("{key}: '{value}' is not a number")))?;
            let slot = match key {
                "a" => &mut self.a,
                "c" => &mut self.c,
                "d" => &mut self.d,
                "f" => &mut self.f,
                "g" => &mut self.g,
                "h" => &mut self.h,
                "j" => &mut self.j,
                "k" => &mut self.k,
                other => return Err(Error::Params(format!("unknown parameter '{other}'"))),
            };
            *slot = v;
        }
        self.validate()?;
        Ok(self)
    }
}

/// Per-block means and the thresholds derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub mu_y: f64,
    pub mu_cb: f64,
    pub mu_cr: f64,
    pub l_y: f64,
    pub c_cb: f64,
    pub c_cr: f64,
    pub sample_count: usize,
}

impl BlockStats {
    /// Computes means and thresholds for one co-located Y/Cb/Cr block.
    pub fn compute<Y, Cb, Cr>(y: Y, cb: Cb, cr: Cr, bit_depth: BitDepth, params: &MaskingParams) -> Result<Self>
    where
        Y: IntoIterator<Item = u16>,
        Cb: IntoIterator<Item = u16>,
        Cr: IntoIterator<Item = u16>,
    {
        let (mu_y, sample_count) = mean_and_count(y)?;
        let mu_cb = block_mean(cb)?;
        let mu_cr = block_mean(cr)?;
        Ok(BlockStats {
            mu_y,
            mu_cb,
            mu_cr,
            l_y: luma_threshold(mu_y, bit_depth, params)?,
            c_cb: chroma_threshold(mu_cb, bit_depth, params)?,
            c_cr: chroma_threshold(mu_cr, bit_depth, params)?,
            sample_count,
        })
    }
}

fn mean_and_count<I: IntoIterator<Item = u16>>(samples: I) -> Result<(f64, usize)> {
    let (sum, count) = samples.into_iter().fold((0u64, 0usize), |(s, n), v| (s + u64::from(v), n + 1));
    if count == 0 {
        return Err(Error::Partition("block contains no samples".into()));
    }
    Ok((sum as f64 / count as f64, count))
}

/// Arithmetic mean of a block's samples, divided by the actual sample count.
///
/// The sum is accumulated exactly in integers, so the only rounding is the
/// final division.
pub fn block_mean<I: IntoIterator<Item = u16>>(samples: I) -> Result<f64> {
    mean_and_count(samples).map(|(mean, _)| mean)
}

fn check_mean(mu: f64, bit_depth: BitDepth) -> Result<()> {
    let max = f64::from(bit_depth.max_sample());
    if !(0.0..=max).contains(&mu) {
        return Err(Error::domain("mean sample value", mu, 0.0, max));
    }
    Ok(())
}

/// Luma threshold on the bit-depth independent axis `t = 2·mu / 2^b`, `t ∈ [0, 2]`.
pub fn luma_threshold_normalized(t: f64, params: &MaskingParams) -> f64 {
    if t <= 1.0 {
        params.a * (1.0 - t).powf(params.d) + 1.0
    } else {
        params.c * (t - 1.0).powf(params.f) + 1.0
    }
}

/// Luminance masking threshold `L(mu)`.
///
/// A parabola with its minimum of 1 at mid-grey (`2^(b-1)`), rising to
/// `a + 1` at black and `c·(1 - 2/2^b)^f + 1` at peak white.
pub fn luma_threshold(mu: f64, bit_depth: BitDepth, params: &MaskingParams) -> Result<f64> {
    check_mean(mu, bit_depth)?;
    Ok(luma_threshold_normalized(2.0 * mu / bit_depth.range(), params))
}

/// Chrominance masking threshold `C(mu)`, shared by Cb and Cr.
///
/// Falls linearly from `g` at 0 to 1 at `h`, stays at 1 on `(h, j)` and rises
/// linearly to `k` at the largest sample value.
pub fn chroma_threshold(mu: f64, bit_depth: BitDepth, params: &MaskingParams) -> Result<f64> {
    check_mean(mu, bit_depth)?;
    let (h, j) = params.breakpoints(bit_depth);
    let top = f64::from(bit_depth.max_sample());
    if j >= top {
        return Err(Error::Params(format!("upper breakpoint {j} must be below the maximum sample {top}")));
    }
    let c = if mu <= h {
        -mu * (params.g - 1.0) / h + params.g
    } else if mu < j {
        1.0
    } else {
        (mu - j) * (params.k - 1.0) / (top - j) + 1.0
    };
    Ok(c)
}

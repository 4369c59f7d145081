//! Transform, quantize and reconstruct frames under a QP map.
//!
//! Every block of every channel goes through a forward DCT, scalar
//! quantization at the block's effective step, dequantization and an inverse
//! DCT. Levels feed an exp-Golomb rate proxy; reconstructions feed PSNR and
//! the per-sample visibility check `|q| <= threshold`.

pub mod dct;
pub mod metrics;
pub mod quant;
pub mod rate;

use std::collections::BTreeMap;

use rayon::prelude::*;

pub use dct::Dct2;
pub use metrics::{psnr, psnr_from_sse, sse};
pub use quant::{dequantize, quantize};
pub use rate::{histogram_entropy_bits, rate_estimate, signed_exp_golomb_len};

use crate::block::{analyze_frame, partition, BlockRect, BlockSize, Channel, QpCell, QpMap, VideoFrame};
use crate::error::{Error, Result};
use crate::jnd::{BitDepth, MaskingParams};
use crate::qp::{Model, QpConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub qp: QpConfig,
    pub block_size: BlockSize,
    /// Rounding offset `theta` of the quantizer, in `[0, 1)`.
    pub rounding_offset: f64,
    pub model: Model,
    pub bit_depth: BitDepth,
    /// Reconstruct from unquantized coefficients. Rates are still measured.
    pub bypass_quantization: bool,
}

impl SimConfig {
    pub fn new(base_qp: i32, bit_depth: BitDepth, model: Model) -> Result<Self> {
        Ok(SimConfig {
            qp: QpConfig::new(base_qp)?,
            block_size: BlockSize::DEFAULT,
            rounding_offset: 0.5,
            model,
            bit_depth,
            bypass_quantization: false,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.qp.validate()?;
        if !(0.0..1.0).contains(&self.rounding_offset) {
            return Err(Error::domain("rounding offset", self.rounding_offset, 0.0, 1.0));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelReport {
    pub channel: Channel,
    pub estimated_bits: u64,
    pub coefficient_count: u64,
    /// Order-0 entropy of the level histogram, for reference only.
    pub level_entropy_bits: f64,
    pub sse: u64,
    pub sample_count: u64,
    pub psnr_db: f64,
    pub jnd_violations: u64,
    pub jnd_violation_fraction: f64,
    pub max_abs_error: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub model: Model,
    pub base_qp: i32,
    pub block_size: BlockSize,
    pub rounding_offset: f64,
    pub bit_depth: BitDepth,
    pub width: usize,
    pub height: usize,
    pub frame_count: usize,
    pub channels: [ChannelReport; 3],
    pub total_bits: u64,
    pub qp_maps: Vec<QpMap>,
}

impl SimReport {
    pub fn channel(&self, ch: Channel) -> &ChannelReport {
        &self.channels[ch.index()]
    }
}

#[derive(Debug, Default, Clone)]
struct Tally {
    bits: u64,
    coefs: u64,
    sse: u64,
    samples: u64,
    violations: u64,
    max_abs_error: u32,
    histogram: BTreeMap<i64, u64>,
}

impl Tally {
    fn merge(&mut self, other: Tally) {
        self.bits += other.bits;
        self.coefs += other.coefs;
        self.sse += other.sse;
        self.samples += other.samples;
        self.violations += other.violations;
        self.max_abs_error = self.max_abs_error.max(other.max_abs_error);
        for (level, count) in other.histogram {
            *self.histogram.entry(level).or_insert(0) += count;
        }
    }
}

struct BlockCoder<'a> {
    dct: &'a Dct2,
    theta: f64,
    max_sample: f64,
    bypass: bool,
}

impl BlockCoder<'_> {
    fn code(&self, frame: &VideoFrame, rect: &BlockRect, ch: Channel, qstep: f64, threshold: f64) -> Tally {
        let n = self.dct.size();
        let plane = frame.plane(ch);
        let mut block = vec![0.0; n * n];
        for (i, v) in plane.block_samples(rect).enumerate() {
            block[(i / rect.width) * n + i % rect.width] = f64::from(v);
        }
        let mut coefs = self.dct.forward(&block);
        let mut tally = Tally { coefs: coefs.len() as u64, ..Tally::default() };
        for c in coefs.iter_mut() {
            let level = quantize(*c, qstep, self.theta);
            tally.bits += signed_exp_golomb_len(level);
            *tally.histogram.entry(level).or_insert(0) += 1;
            if !self.bypass {
                *c = dequantize(level, qstep);
            }
        }
        let recon = self.dct.inverse(&coefs);
        for (i, orig) in plane.block_samples(rect).enumerate() {
            let r = recon[(i / rect.width) * n + i % rect.width].round().clamp(0.0, self.max_sample) as i64;
            let err = (r - i64::from(orig)).unsigned_abs();
            tally.sse += err * err;
            tally.samples += 1;
            if err as f64 > threshold {
                tally.violations += 1;
            }
            tally.max_abs_error = tally.max_abs_error.max(err as u32);
        }
        tally
    }
}

fn effective_qstep(cfg: &SimConfig, cell: &QpCell, ch: Channel) -> Result<f64> {
    let qp = match ch {
        Channel::Y => cell.qp.pqp_y,
        Channel::Cb => cell.qp.pqp_cb,
        Channel::Cr => cell.qp.pqp_cr,
    };
    cfg.qp.qstep(qp)
}

fn threshold(cell: &QpCell, ch: Channel) -> f64 {
    match ch {
        Channel::Y => cell.stats.l_y,
        Channel::Cb => cell.stats.c_cb,
        Channel::Cr => cell.stats.c_cr,
    }
}

/// Runs the coding loop over `frames` and aggregates rates and distortion.
///
/// Block results are merged in frame and raster order, so the report does
/// not depend on the rayon worker count.
pub fn simulate(frames: &[VideoFrame], cfg: &SimConfig, params: &MaskingParams) -> Result<SimReport> {
    cfg.validate()?;
    params.validate()?;
    let (width, height) = frames.first().map(|f| (f.width(), f.height())).unwrap_or((0, 0));
    for (i, f) in frames.iter().enumerate() {
        if (f.width(), f.height()) != (width, height) {
            return Err(Error::Dimensions(format!(
                "frame {i} is {}x{}, frame 0 is {width}x{height}",
                f.width(),
                f.height()
            )));
        }
        if f.bit_depth() != cfg.bit_depth {
            return Err(Error::Config(format!(
                "frame {i} has bit depth {}, configuration expects {}",
                f.bit_depth().bits(),
                cfg.bit_depth.bits()
            )));
        }
    }

    let dct = Dct2::new(cfg.block_size.get());
    let coder = BlockCoder {
        dct: &dct,
        theta: cfg.rounding_offset,
        max_sample: f64::from(cfg.bit_depth.max_sample()),
        bypass: cfg.bypass_quantization,
    };

    let per_frame = frames
        .par_iter()
        .enumerate()
        .map(|(index, frame)| {
            let map = analyze_frame(frame, index, cfg.block_size, params, &cfg.qp, cfg.model)?;
            let grid = partition(frame, cfg.block_size);
            let blocks = grid
                .rects
                .par_iter()
                .zip(map.cells.par_iter())
                .map(|(rect, cell)| {
                    let mut out: [Tally; 3] = Default::default();
                    for ch in Channel::ALL {
                        let step = effective_qstep(cfg, cell, ch)?;
                        out[ch.index()] = coder.code(frame, rect, ch, step, threshold(cell, ch));
                    }
                    Ok(out)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((map, blocks))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut totals: [Tally; 3] = Default::default();
    let mut qp_maps = Vec::with_capacity(frames.len());
    for (map, blocks) in per_frame {
        for block in blocks {
            for (total, t) in totals.iter_mut().zip(block) {
                total.merge(t);
            }
        }
        qp_maps.push(map);
    }

    let channels = Channel::ALL.map(|ch| {
        let t = &totals[ch.index()];
        ChannelReport {
            channel: ch,
            estimated_bits: t.bits,
            coefficient_count: t.coefs,
            level_entropy_bits: histogram_entropy_bits(&t.histogram),
            sse: t.sse,
            sample_count: t.samples,
            psnr_db: psnr_from_sse(t.sse, t.samples, cfg.bit_depth),
            jnd_violations: t.violations,
            jnd_violation_fraction: if t.samples == 0 { 0.0 } else { t.violations as f64 / t.samples as f64 },
            max_abs_error: t.max_abs_error,
        }
    });
    let total_bits = channels.iter().map(|c| c.estimated_bits).sum();
    Ok(SimReport {
        model: cfg.model,
        base_qp: cfg.qp.base_qp,
        block_size: cfg.block_size,
        rounding_offset: cfg.rounding_offset,
        bit_depth: cfg.bit_depth,
        width,
        height,
        frame_count: frames.len(),
        channels,
        total_bits,
        qp_maps,
    })
}

/// `100 · (bits - baseline) / baseline`; negative means fewer bits.
pub fn rate_delta_percent(bits: u64, baseline: u64) -> f64 {
    if baseline == 0 {
        return 0.0;
    }
    100.0 * (bits as f64 - baseline as f64) / baseline as f64
}

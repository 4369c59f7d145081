//! Frames, fixed-grid coding-block partitioning and per-frame QP maps.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jnd::{BitDepth, BlockStats, MaskingParams};
use crate::qp::{BlockQp, Model, QpConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Channel {
    Y,
    Cb,
    Cr,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Y, Channel::Cb, Channel::Cr];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Y => "y",
            Channel::Cb => "cb",
            Channel::Cr => "cr",
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Channel::Y => "Y",
            Channel::Cb => "Cb",
            Channel::Cr => "Cr",
        })
    }
}

/// One row-major sample plane.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plane {
    width: usize,
    height: usize,
    data: Vec<u16>,
}

impl Plane {
    pub fn new(width: usize, height: usize, data: Vec<u16>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Dimensions(format!(
                "plane of {width}x{height} needs {} samples, got {}",
                width * height,
                data.len()
            )));
        }
        Ok(Plane { width, height, data })
    }

    pub fn filled(width: usize, height: usize, value: u16) -> Self {
        Plane { width, height, data: vec![value; width * height] }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u16] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u16] {
        &mut self.data
    }

    pub fn get(&self, x: usize, y: usize) -> u16 {
        self.data[y * self.width + x]
    }

    pub fn set(&mut self, x: usize, y: usize, v: u16) {
        self.data[y * self.width + x] = v;
    }

    /// Row-major view of the samples covered by `rect`.
    pub fn block_samples<'a>(&'a self, rect: &BlockRect) -> impl Iterator<Item = u16> + 'a {
        let (x0, w) = (rect.x, rect.width);
        (rect.y..rect.y + rect.height).flat_map(move |row| {
            let start = row * self.width + x0;
            self.data[start..start + w].iter().copied()
        })
    }
}

/// A planar 4:4:4 frame: Y, Cb and Cr share one resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VideoFrame {
    bit_depth: BitDepth,
    planes: [Plane; 3],
}

impl VideoFrame {
    pub fn new(bit_depth: BitDepth, y: Plane, cb: Plane, cr: Plane) -> Result<Self> {
        if y.width == 0 || y.height == 0 {
            return Err(Error::Dimensions("frame has zero width or height".into()));
        }
        for (name, p) in [("Cb", &cb), ("Cr", &cr)] {
            if (p.width, p.height) != (y.width, y.height) {
                return Err(Error::Dimensions(format!(
                    "{name} plane is {}x{}, luma is {}x{}",
                    p.width, p.height, y.width, y.height
                )));
            }
        }
        let max = bit_depth.max_sample();
        for (ch, p) in Channel::ALL.iter().zip([&y, &cb, &cr]) {
            if let Some(offset) = p.data.iter().position(|&v| u32::from(v) > max) {
                return Err(Error::SampleRange {
                    plane: ch.name(),
                    offset,
                    value: u32::from(p.data[offset]),
                    bit_depth: bit_depth.bits(),
                });
            }
        }
        Ok(VideoFrame { bit_depth, planes: [y, cb, cr] })
    }

    /// Frame with every sample of each plane set to the given value.
    pub fn constant(width: usize, height: usize, bit_depth: BitDepth, y: u16, cb: u16, cr: u16) -> Result<Self> {
        VideoFrame::new(
            bit_depth,
            Plane::filled(width, height, y),
            Plane::filled(width, height, cb),
            Plane::filled(width, height, cr),
        )
    }

    pub fn width(&self) -> usize {
        self.planes[0].width
    }

    pub fn height(&self) -> usize {
        self.planes[0].height
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn plane(&self, ch: Channel) -> &Plane {
        &self.planes[ch.index()]
    }

    pub fn planes(&self) -> &[Plane; 3] {
        &self.planes
    }
}

/// Coding-block edge length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "usize", into = "usize")]
pub struct BlockSize(usize);

impl BlockSize {
    pub const DEFAULT: BlockSize = BlockSize(16);

    pub fn new(n: usize) -> Result<Self> {
        match n {
            8 | 16 | 32 | 64 => Ok(BlockSize(n)),
            other => Err(Error::BlockSize(other)),
        }
    }

    pub fn get(self) -> usize {
        self.0
    }
}

impl Default for BlockSize {
    fn default() -> Self {
        BlockSize::DEFAULT
    }
}

impl TryFrom<usize> for BlockSize {
    type Error = Error;

    fn try_from(n: usize) -> Result<Self> {
        BlockSize::new(n)
    }
}

impl From<BlockSize> for usize {
    fn from(b: BlockSize) -> usize {
        b.0
    }
}

/// Position and extent of one block. Edge blocks are truncated to the frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockRect {
    pub bx: usize,
    pub by: usize,
    pub x: usize,
    pub y: usize,
    pub width: usize,
    pub height: usize,
}

impl BlockRect {
    pub fn sample_count(&self) -> usize {
        self.width * self.height
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    pub block_size: BlockSize,
    pub grid_w: usize,
    pub grid_h: usize,
    /// Row-major, `by * grid_w + bx`.
    pub rects: Vec<BlockRect>,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, block_size: BlockSize) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Partition(format!("cannot partition a {width}x{height} frame")));
        }
        let n = block_size.get();
        let grid_w = width.div_ceil(n);
        let grid_h = height.div_ceil(n);
        let rects = (0..grid_h)
            .flat_map(|by| {
                (0..grid_w).map(move |bx| {
                    let (x, y) = (bx * n, by * n);
                    BlockRect { bx, by, x, y, width: n.min(width - x), height: n.min(height - y) }
                })
            })
            .collect();
        Ok(BlockGrid { block_size, grid_w, grid_h, rects })
    }

    pub fn len(&self) -> usize {
        self.rects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rects.is_empty()
    }
}

pub fn partition(frame: &VideoFrame, block_size: BlockSize) -> BlockGrid {
    BlockGrid::new(frame.width(), frame.height(), block_size).expect("frames are never empty")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QpCell {
    pub bx: usize,
    pub by: usize,
    pub stats: BlockStats,
    pub qp: BlockQp,
}

/// Per-block statistics and QPs for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct QpMap {
    pub frame_index: usize,
    pub width: usize,
    pub height: usize,
    pub bit_depth: BitDepth,
    pub block_size: BlockSize,
    pub grid_w: usize,
    pub grid_h: usize,
    pub base_qp: i32,
    pub model: Model,
    /// Row-major, `by * grid_w + bx`.
    pub cells: Vec<QpCell>,
}

impl QpMap {
    pub fn cell(&self, bx: usize, by: usize) -> &QpCell {
        &self.cells[by * self.grid_w + bx]
    }
}

/// Computes block statistics and perceptual QPs for every block of `frame`.
///
/// Thresholds are always evaluated for all three channels; `model` only
/// decides which of them reach the QPs.
pub fn analyze_frame(
    frame: &VideoFrame,
    frame_index: usize,
    block_size: BlockSize,
    params: &MaskingParams,
    cfg: &QpConfig,
    model: Model,
) -> Result<QpMap> {
    params.validate()?;
    cfg.validate()?;
    let grid = partition(frame, block_size);
    let bit_depth = frame.bit_depth();
    let cells = grid
        .rects
        .par_iter()
        .map(|rect| {
            let stats = BlockStats::compute(
                frame.plane(Channel::Y).block_samples(rect),
                frame.plane(Channel::Cb).block_samples(rect),
                frame.plane(Channel::Cr).block_samples(rect),
                bit_depth,
                params,
            )?;
            let qp = BlockQp::derive(&stats, cfg, model)?;
            Ok(QpCell { bx: rect.bx, by: rect.by, stats, qp })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(QpMap {
        frame_index,
        width: frame.width(),
        height: frame.height(),
        bit_depth,
        block_size,
        grid_w: grid.grid_w,
        grid_h: grid.grid_h,
        base_qp: cfg.base_qp,
        model,
        cells,
    })
}

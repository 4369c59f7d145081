//! Raw planar YUV files and the JSON/CSV sidecars.
//!
//! Raw files hold frames back to back, each as a full Y plane followed by Cb
//! and Cr. Samples are one byte at 8 bits and two little-endian bytes (value
//! in the low bits) otherwise.
//!
//! Reals in the sidecars are rounded to 6 significant digits so that output
//! files are byte-stable.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::block::{Channel, Plane, QpMap, VideoFrame};
use crate::error::{Error, Result};
use crate::jnd::{chroma_threshold, luma_threshold, BitDepth, MaskingParams};
use crate::sim::SimReport;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RawVideoSpec {
    pub path: PathBuf,
    pub width: usize,
    pub height: usize,
    pub bit_depth: BitDepth,
    /// Number of frames to read; 0 reads to the end of the file.
    pub frame_count: usize,
}

impl RawVideoSpec {
    pub fn new(path: impl Into<PathBuf>, width: usize, height: usize, bit_depth: BitDepth) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::Dimensions(format!("raw video must have positive dimensions, got {width}x{height}")));
        }
        Ok(RawVideoSpec { path: path.into(), width, height, bit_depth, frame_count: 0 })
    }

    pub fn with_frame_count(mut self, frames: usize) -> Self {
        self.frame_count = frames;
        self
    }

    pub fn plane_bytes(&self) -> usize {
        self.width * self.height * self.bit_depth.bytes_per_sample()
    }

    pub fn frame_bytes(&self) -> usize {
        3 * self.plane_bytes()
    }
}

/// Streams frames out of a raw planar file.
pub struct YuvReader<R> {
    inner: R,
    spec: RawVideoSpec,
    next_frame: usize,
    done: bool,
    buf: Vec<u8>,
}

impl YuvReader<BufReader<File>> {
    pub fn open(spec: RawVideoSpec) -> Result<Self> {
        let file = File::open(&spec.path).map_err(|e| Error::io(&spec.path, e))?;
        Ok(YuvReader::new(BufReader::new(file), spec))
    }
}

impl<R: Read> YuvReader<R> {
    pub fn new(inner: R, spec: RawVideoSpec) -> Self {
        let buf = vec![0; spec.frame_bytes()];
        YuvReader { inner, spec, next_frame: 0, done: false, buf }
    }

    fn fill(&mut self) -> Result<usize> {
        let mut filled = 0;
        while filled < self.buf.len() {
            match self.inner.read(&mut self.buf[filled..]) {
                Ok(0) => break,
                Ok(n) => filled += n,
                Err(e) if e.kind() == std::io::ErrorKind::Interrupted => continue,
                Err(e) => return Err(Error::io(&self.spec.path, e)),
            }
        }
        Ok(filled)
    }

    fn decode(&self) -> Result<VideoFrame> {
        let bd = self.spec.bit_depth;
        let samples = self.spec.width * self.spec.height;
        let planes: Vec<Plane> = self
            .buf
            .chunks_exact(self.spec.plane_bytes())
            .map(|bytes| {
                let data: Vec<u16> = if bd.bytes_per_sample() == 1 {
                    bytes.iter().map(|&b| u16::from(b)).collect()
                } else {
                    bytes.chunks_exact(2).map(|w| u16::from_le_bytes([w[0], w[1]])).collect()
                };
                debug_assert_eq!(data.len(), samples);
                Plane::new(self.spec.width, self.spec.height, data)
            })
            .collect::<Result<_>>()?;
        let [y, cb, cr]: [Plane; 3] = planes.try_into().expect("three planes per frame");
        VideoFrame::new(bd, y, cb, cr)
    }
}

impl<R: Read> Iterator for YuvReader<R> {
    type Item = Result<VideoFrame>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done || (self.spec.frame_count > 0 && self.next_frame >= self.spec.frame_count) {
            return None;
        }
        let frame = self.next_frame;
        let got = match self.fill() {
            Ok(n) => n,
            Err(e) => {
                self.done = true;
                return Some(Err(e));
            }
        };
        if got == 0 && self.spec.frame_count == 0 {
            self.done = true;
            return None;
        }
        if got < self.buf.len() {
            self.done = true;
            return Some(Err(Error::Truncated {
                path: self.spec.path.clone(),
                frame,
                available: got,
                expected: self.buf.len(),
            }));
        }
        self.next_frame += 1;
        Some(self.decode().map_err(|e| match e {
            Error::SampleRange { plane, offset, value, bit_depth } => {
                // report the offset relative to the start of the file
                let plane_index = Channel::ALL.iter().position(|c| c.name() == plane).unwrap_or(0);
                let file_offset = frame * self.spec.frame_bytes()
                    + plane_index * self.spec.plane_bytes()
                    + offset * self.spec.bit_depth.bytes_per_sample();
                Error::SampleRange { plane, offset: file_offset, value, bit_depth }
            }
            other => other,
        }))
    }
}

pub fn read_yuv(spec: &RawVideoSpec) -> Result<Vec<VideoFrame>> {
    YuvReader::open(spec.clone())?.collect()
}

pub fn encode_frame(frame: &VideoFrame, out: &mut Vec<u8>) {
    let wide = frame.bit_depth().bytes_per_sample() == 2;
    for plane in frame.planes() {
        if wide {
            out.extend(plane.data().iter().flat_map(|v| v.to_le_bytes()));
        } else {
            out.extend(plane.data().iter().map(|&v| v as u8));
        }
    }
}

pub fn write_yuv(frames: &[VideoFrame], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    let mut buf = Vec::new();
    for f in frames {
        buf.clear();
        encode_frame(f, &mut buf);
        w.write_all(&buf).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

/// Rounds to 6 significant digits.
pub fn sig6(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.5e}").parse().expect("formatted float parses")
}

/// 6-significant-digit text form used in tables; always has a decimal point.
pub fn fmt_real(x: f64) -> String {
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    format!("{:?}", sig6(x))
}

/// A real serialized as a 6-digit number, or as `"inf"`/`"-inf"`/`"nan"`.
#[derive(Debug, Clone, Copy)]
struct Real(f64);

impl Serialize for Real {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v = self.0;
        if v.is_nan() {
            s.serialize_str("nan")
        } else if v.is_infinite() {
            s.serialize_str(if v > 0.0 { "inf" } else { "-inf" })
        } else {
            s.serialize_f64(sig6(v))
        }
    }
}

#[derive(Serialize)]
struct CellRecord {
    bx: usize,
    by: usize,
    mu_y: Real,
    mu_cb: Real,
    mu_cr: Real,
    l: Real,
    c_cb: Real,
    c_cr: Real,
    pqp_y: i32,
    pqp_cb: i32,
    pqp_cr: i32,
    oqp_cb_literal: i32,
    oqp_cb_delta: i32,
    oqp_cr_literal: i32,
    oqp_cr_delta: i32,
}

#[derive(Serialize)]
struct QpMapRecord {
    frame_index: usize,
    width: usize,
    height: usize,
    bit_depth: u32,
    block_size: usize,
    grid_w: usize,
    grid_h: usize,
    base_qp: i32,
    model: &'static str,
    cells: Vec<CellRecord>,
}

impl From<&QpMap> for QpMapRecord {
    fn from(m: &QpMap) -> Self {
        QpMapRecord {
            frame_index: m.frame_index,
            width: m.width,
            height: m.height,
            bit_depth: m.bit_depth.bits(),
            block_size: m.block_size.get(),
            grid_w: m.grid_w,
            grid_h: m.grid_h,
            base_qp: m.base_qp,
            model: m.model.name(),
            cells: m
                .cells
                .iter()
                .map(|c| CellRecord {
                    bx: c.bx,
                    by: c.by,
                    mu_y: Real(c.stats.mu_y),
                    mu_cb: Real(c.stats.mu_cb),
                    mu_cr: Real(c.stats.mu_cr),
                    l: Real(c.stats.l_y),
                    c_cb: Real(c.stats.c_cb),
                    c_cr: Real(c.stats.c_cr),
                    pqp_y: c.qp.pqp_y,
                    pqp_cb: c.qp.pqp_cb,
                    pqp_cr: c.qp.pqp_cr,
                    oqp_cb_literal: c.qp.oqp_cb_literal,
                    oqp_cb_delta: c.qp.oqp_cb_delta,
                    oqp_cr_literal: c.qp.oqp_cr_literal,
                    oqp_cr_delta: c.qp.oqp_cr_delta,
                })
                .collect(),
        }
    }
}

#[derive(Serialize)]
struct ChannelRecord {
    channel: &'static str,
    estimated_bits: u64,
    coefficient_count: u64,
    level_entropy_bits: Real,
    sse: u64,
    sample_count: u64,
    psnr_db: Real,
    jnd_violations: u64,
    jnd_violation_fraction: Real,
    max_abs_error: u32,
}

#[derive(Serialize)]
struct ReportRecord {
    model: &'static str,
    base_qp: i32,
    block_size: usize,
    rounding_offset: Real,
    bit_depth: u32,
    width: usize,
    height: usize,
    frame_count: usize,
    total_bits: u64,
    channels: Vec<ChannelRecord>,
    qp_maps: Vec<QpMapRecord>,
}

impl From<&SimReport> for ReportRecord {
    fn from(r: &SimReport) -> Self {
        ReportRecord {
            model: r.model.name(),
            base_qp: r.base_qp,
            block_size: r.block_size.get(),
            rounding_offset: Real(r.rounding_offset),
            bit_depth: r.bit_depth.bits(),
            width: r.width,
            height: r.height,
            frame_count: r.frame_count,
            total_bits: r.total_bits,
            channels: r
                .channels
                .iter()
                .map(|c| ChannelRecord {
                    channel: c.channel.name(),
                    estimated_bits: c.estimated_bits,
                    coefficient_count: c.coefficient_count,
                    level_entropy_bits: Real(c.level_entropy_bits),
                    sse: c.sse,
                    sample_count: c.sample_count,
                    psnr_db: Real(c.psnr_db),
                    jnd_violations: c.jnd_violations,
                    jnd_violation_fraction: Real(c.jnd_violation_fraction),
                    max_abs_error: c.max_abs_error,
                })
                .collect(),
            qp_maps: r.qp_maps.iter().map(QpMapRecord::from).collect(),
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn qpmap_json(map: &QpMap) -> Result<String> {
    to_json(&QpMapRecord::from(map))
}

/// Several frames' maps as one `{"frames": [...]}` object.
pub fn qpmaps_json(maps: &[QpMap]) -> Result<String> {
    #[derive(Serialize)]
    struct Seq {
        frames: Vec<QpMapRecord>,
    }
    to_json(&Seq { frames: maps.iter().map(QpMapRecord::from).collect() })
}

pub fn report_json(report: &SimReport) -> Result<String> {
    to_json(&ReportRecord::from(report))
}

pub fn write_qpmap(map: &QpMap, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &qpmap_json(map)?)
}

pub fn write_qpmaps(maps: &[QpMap], path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &qpmaps_json(maps)?)
}

pub fn write_report(report: &SimReport, path: impl AsRef<Path>) -> Result<()> {
    write_text(path.as_ref(), &report_json(report)?)
}

/// `mu,threshold` table for one channel's threshold function, `mu` from 0
/// to `2^b - 1` in increments of `step`.
pub fn curve_csv(channel: Channel, bit_depth: BitDepth, params: &MaskingParams, step: f64) -> Result<String> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::domain("curve step", step, f64::MIN_POSITIVE, f64::MAX));
    }
    params.validate()?;
    let top = f64::from(bit_depth.max_sample());
    let mut out = String::from("mu,threshold\n");
    let mut i = 0u64;
    loop {
        let mu = i as f64 * step;
        if mu > top {
            break;
        }
        let t = match channel {
            Channel::Y => luma_threshold(mu, bit_depth, params)?,
            Channel::Cb | Channel::Cr => chroma_threshold(mu, bit_depth, params)?,
        };
        out.push_str(&fmt_real(mu));
        out.push(',');
        out.push_str(&fmt_real(t));
        out.push('\n');
        i += 1;
    }
    Ok(out)
}

pub fn write_curve(
    channel: Channel,
    bit_depth: BitDepth,
    params: &MaskingParams,
    step: f64,
    path: impl AsRef<Path>,
) -> Result<()> {
    write_text(path.as_ref(), &curve_csv(channel, bit_depth, params, step)?)
}

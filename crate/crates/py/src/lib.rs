//! Python bindings: `import scpaq`.

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;

use scpaq::io as sio;
use scpaq::synth::ClipKind;
use scpaq::{BitDepth, BlockSize, Channel, Error, Model, OffsetMode, Plane, QpConfig, SimConfig, VideoFrame};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } | Error::Truncated { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn bit_depth(bits: u32) -> PyResult<BitDepth> {
    BitDepth::new(bits).map_err(to_py)
}

fn model(name: &str) -> PyResult<Model> {
    name.parse().map_err(to_py)
}

fn channel(name: &str) -> PyResult<Channel> {
    match name.to_ascii_lowercase().as_str() {
        "y" => Ok(Channel::Y),
        "cb" => Ok(Channel::Cb),
        "cr" => Ok(Channel::Cr),
        other => Err(PyValueError::new_err(format!("unknown component '{other}' (expected y, cb or cr)"))),
    }
}

fn offset_mode(name: &str) -> PyResult<OffsetMode> {
    match name {
        "delta" => Ok(OffsetMode::Delta),
        "literal" => Ok(OffsetMode::Literal),
        other => Err(PyValueError::new_err(format!("unknown offset mode '{other}'"))),
    }
}

#[pyclass(name = "MaskingParams", skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyMaskingParams {
    inner: scpaq::MaskingParams,
}

#[pymethods]
impl PyMaskingParams {
    #[new]
    #[pyo3(signature = (a=2.0, c=0.8, d=3.0, f=2.0, g=3.0, h=85.0, j=90.0, k=3.0, scale_breakpoints=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(a: f64, c: f64, d: f64, f: f64, g: f64, h: f64, j: f64, k: f64, scale_breakpoints: bool) -> PyResult<Self> {
        let inner = scpaq::MaskingParams { a, c, d, f, g, h, j, k, scale_breakpoints };
        inner.validate().map_err(to_py)?;
        Ok(PyMaskingParams { inner })
    }

    #[getter]
    fn a(&self) -> f64 {
        self.inner.a
    }
    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }
    #[getter]
    fn d(&self) -> f64 {
        self.inner.d
    }
    #[getter]
    fn f(&self) -> f64 {
        self.inner.f
    }
    #[getter]
    fn g(&self) -> f64 {
        self.inner.g
    }
    #[getter]
    fn h(&self) -> f64 {
        self.inner.h
    }
    #[getter]
    fn j(&self) -> f64 {
        self.inner.j
    }
    #[getter]
    fn k(&self) -> f64 {
        self.inner.k
    }

    fn __repr__(&self) -> String {
        let p = &self.inner;
        format!(
            "MaskingParams(a={}, c={}, d={}, f={}, g={}, h={}, j={}, k={}, scale_breakpoints={})",
            p.a, p.c, p.d, p.f, p.g, p.h, p.j, p.k, p.scale_breakpoints
        )
    }
}

fn params_or_default(params: Option<PyRef<'_, PyMaskingParams>>) -> scpaq::MaskingParams {
    params.map(|p| p.inner).unwrap_or_default()
}

/// A planar 4:4:4 frame built from three row-major sample lists.
#[pyclass(name = "VideoFrame", skip_from_py_object)]
#[derive(Clone)]
struct PyVideoFrame {
    inner: VideoFrame,
}

#[pymethods]
impl PyVideoFrame {
    #[new]
    fn new(width: usize, height: usize, bit_depth: u32, y: Vec<u16>, cb: Vec<u16>, cr: Vec<u16>) -> PyResult<Self> {
        let plane = |data| Plane::new(width, height, data).map_err(to_py);
        let inner = VideoFrame::new(self::bit_depth(bit_depth)?, plane(y)?, plane(cb)?, plane(cr)?).map_err(to_py)?;
        Ok(PyVideoFrame { inner })
    }

    #[staticmethod]
    fn constant(width: usize, height: usize, bit_depth: u32, y: u16, cb: u16, cr: u16) -> PyResult<Self> {
        let inner = VideoFrame::constant(width, height, self::bit_depth(bit_depth)?, y, cb, cr).map_err(to_py)?;
        Ok(PyVideoFrame { inner })
    }

    #[getter]
    fn width(&self) -> usize {
        self.inner.width()
    }

    #[getter]
    fn height(&self) -> usize {
        self.inner.height()
    }

    #[getter]
    fn bit_depth(&self) -> u32 {
        self.inner.bit_depth().bits()
    }

    /// Samples of one plane ("y", "cb" or "cr").
    fn plane(&self, component: &str) -> PyResult<Vec<u16>> {
        Ok(self.inner.plane(channel(component)?).data().to_vec())
    }
}

#[pyclass(name = "QpMap", frozen)]
struct PyQpMap {
    inner: scpaq::QpMap,
}

#[pymethods]
impl PyQpMap {
    #[getter]
    fn grid_w(&self) -> usize {
        self.inner.grid_w
    }

    #[getter]
    fn grid_h(&self) -> usize {
        self.inner.grid_h
    }

    #[getter]
    fn base_qp(&self) -> i32 {
        self.inner.base_qp
    }

    /// `(pqp_y, pqp_cb, pqp_cr)` of block `(bx, by)`.
    fn qps(&self, bx: usize, by: usize) -> PyResult<(i32, i32, i32)> {
        if bx >= self.inner.grid_w || by >= self.inner.grid_h {
            return Err(PyValueError::new_err(format!("block ({bx}, {by}) outside the {}x{} grid", self.inner.grid_w, self.inner.grid_h)));
        }
        let q = self.inner.cell(bx, by).qp;
        Ok((q.pqp_y, q.pqp_cb, q.pqp_cr))
    }

    /// `(l, c_cb, c_cr)` thresholds of block `(bx, by)`.
    fn thresholds(&self, bx: usize, by: usize) -> PyResult<(f64, f64, f64)> {
        if bx >= self.inner.grid_w || by >= self.inner.grid_h {
            return Err(PyValueError::new_err(format!("block ({bx}, {by}) outside the grid")));
        }
        let s = self.inner.cell(bx, by).stats;
        Ok((s.l_y, s.c_cb, s.c_cr))
    }

    fn to_json(&self) -> PyResult<String> {
        sio::qpmap_json(&self.inner).map_err(to_py)
    }
}

#[pyclass(name = "SimReport", frozen)]
struct PySimReport {
    inner: scpaq::SimReport,
}

#[pymethods]
impl PySimReport {
    #[getter]
    fn total_bits(&self) -> u64 {
        self.inner.total_bits
    }

    #[getter]
    fn model(&self) -> &'static str {
        self.inner.model.name()
    }

    fn estimated_bits(&self, component: &str) -> PyResult<u64> {
        Ok(self.inner.channel(channel(component)?).estimated_bits)
    }

    fn psnr_db(&self, component: &str) -> PyResult<f64> {
        Ok(self.inner.channel(channel(component)?).psnr_db)
    }

    fn jnd_violation_fraction(&self, component: &str) -> PyResult<f64> {
        Ok(self.inner.channel(channel(component)?).jnd_violation_fraction)
    }

    fn to_json(&self) -> PyResult<String> {
        sio::report_json(&self.inner).map_err(to_py)
    }
}

#[pyfunction]
fn block_mean(samples: Vec<u16>) -> PyResult<f64> {
    scpaq::block_mean(samples).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (mu, bit_depth, params=None))]
fn luma_threshold(mu: f64, bit_depth: u32, params: Option<PyRef<'_, PyMaskingParams>>) -> PyResult<f64> {
    scpaq::luma_threshold(mu, self::bit_depth(bit_depth)?, &params_or_default(params)).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (mu, bit_depth, params=None))]
fn chroma_threshold(mu: f64, bit_depth: u32, params: Option<PyRef<'_, PyMaskingParams>>) -> PyResult<f64> {
    scpaq::chroma_threshold(mu, self::bit_depth(bit_depth)?, &params_or_default(params)).map_err(to_py)
}

#[pyfunction]
fn qstep_from_qp(qp: i32) -> PyResult<f64> {
    scpaq::qstep_from_qp(qp).map_err(to_py)
}

#[pyfunction]
fn qp_from_step(step: f64) -> PyResult<i32> {
    scpaq::qp_from_step(step).map_err(to_py)
}

#[pyfunction]
fn perceptual_step(qstep: f64, threshold: f64) -> PyResult<f64> {
    scpaq::perceptual_step(qstep, threshold).map_err(to_py)
}

#[pyfunction]
fn perceptual_chroma_qp(qstep_c: f64, threshold_c: f64) -> PyResult<i32> {
    scpaq::perceptual_chroma_qp(qstep_c, threshold_c).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (pqp_y, pqp_c, mode="delta"))]
fn chroma_offset(pqp_y: i32, pqp_c: i32, mode: &str) -> PyResult<i32> {
    let cfg = QpConfig::new(scpaq::qp::QP_MIN).map_err(to_py)?;
    Ok(scpaq::chroma_offset(pqp_y, pqp_c, offset_mode(mode)?, &cfg))
}

#[pyfunction]
#[pyo3(signature = (frame, base_qp, block_size=16, model="scpaq", params=None, frame_index=0))]
fn analyze_frame(
    py: Python<'_>,
    frame: PyRef<'_, PyVideoFrame>,
    base_qp: i32,
    block_size: usize,
    model: &str,
    params: Option<PyRef<'_, PyMaskingParams>>,
    frame_index: usize,
) -> PyResult<PyQpMap> {
    let cfg = QpConfig::new(base_qp).map_err(to_py)?;
    let n = BlockSize::new(block_size).map_err(to_py)?;
    let m = self::model(model)?;
    let p = params_or_default(params);
    let f = frame.inner.clone();
    let inner = py.detach(|| scpaq::analyze_frame(&f, frame_index, n, &p, &cfg, m)).map_err(to_py)?;
    Ok(PyQpMap { inner })
}

#[pyfunction]
#[pyo3(signature = (frames, base_qp, model="scpaq", block_size=16, theta=0.5, params=None))]
fn simulate(
    py: Python<'_>,
    frames: Vec<PyRef<'_, PyVideoFrame>>,
    base_qp: i32,
    model: &str,
    block_size: usize,
    theta: f64,
    params: Option<PyRef<'_, PyMaskingParams>>,
) -> PyResult<PySimReport> {
    let frames: Vec<VideoFrame> = frames.iter().map(|f| f.inner.clone()).collect();
    let bd = frames.first().map(VideoFrame::bit_depth).unwrap_or(BitDepth::EIGHT);
    let mut cfg = SimConfig::new(base_qp, bd, self::model(model)?).map_err(to_py)?;
    cfg.block_size = BlockSize::new(block_size).map_err(to_py)?;
    cfg.rounding_offset = theta;
    let p = params_or_default(params);
    let inner = py.detach(|| scpaq::simulate(&frames, &cfg, &p)).map_err(to_py)?;
    Ok(PySimReport { inner })
}

#[pyfunction]
fn psnr(reference: PyRef<'_, PyVideoFrame>, test: PyRef<'_, PyVideoFrame>, component: &str) -> PyResult<f64> {
    let ch = channel(component)?;
    scpaq::sim::psnr(reference.inner.plane(ch), test.inner.plane(ch), reference.inner.bit_depth()).map_err(to_py)
}

/// Synthetic clip: kind is "flat", "flat:V", "flat:Y,CB,CR", "gradient" or "dark-bright".
#[pyfunction]
#[pyo3(signature = (kind, width, height, frames, bit_depth=8, seed=0))]
fn generate_clip(kind: &str, width: usize, height: usize, frames: usize, bit_depth: u32, seed: u64) -> PyResult<Vec<PyVideoFrame>> {
    let kind: ClipKind = kind.parse().map_err(to_py)?;
    let clip = scpaq::synth::generate_clip(kind, width, height, frames, self::bit_depth(bit_depth)?, seed).map_err(to_py)?;
    Ok(clip.into_iter().map(|inner| PyVideoFrame { inner }).collect())
}

#[pyfunction]
#[pyo3(signature = (path, width, height, bit_depth, frame_count=0))]
fn read_yuv(path: &str, width: usize, height: usize, bit_depth: u32, frame_count: usize) -> PyResult<Vec<PyVideoFrame>> {
    let spec = sio::RawVideoSpec::new(path, width, height, self::bit_depth(bit_depth)?).map_err(to_py)?.with_frame_count(frame_count);
    Ok(sio::read_yuv(&spec).map_err(to_py)?.into_iter().map(|inner| PyVideoFrame { inner }).collect())
}

#[pyfunction]
fn write_yuv(frames: Vec<PyRef<'_, PyVideoFrame>>, path: &str) -> PyResult<()> {
    let frames: Vec<VideoFrame> = frames.iter().map(|f| f.inner.clone()).collect();
    sio::write_yuv(&frames, path).map_err(to_py)
}

/// `mu,threshold` table for one component's threshold curve.
#[pyfunction]
#[pyo3(signature = (component, bit_depth, step=1.0, params=None))]
fn curve_csv(component: &str, bit_depth: u32, step: f64, params: Option<PyRef<'_, PyMaskingParams>>) -> PyResult<String> {
    sio::curve_csv(channel(component)?, self::bit_depth(bit_depth)?, &params_or_default(params), step).map_err(to_py)
}

#[pymodule]
#[pyo3(name = "scpaq")]
fn scpaq_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMaskingParams>()?;
    m.add_class::<PyVideoFrame>()?;
    m.add_class::<PyQpMap>()?;
    m.add_class::<PySimReport>()?;
    m.add_function(wrap_pyfunction!(block_mean, m)?)?;
    m.add_function(wrap_pyfunction!(luma_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(chroma_threshold, m)?)?;
    m.add_function(wrap_pyfunction!(qstep_from_qp, m)?)?;
    m.add_function(wrap_pyfunction!(qp_from_step, m)?)?;
    m.add_function(wrap_pyfunction!(perceptual_step, m)?)?;
    m.add_function(wrap_pyfunction!(perceptual_chroma_qp, m)?)?;
    m.add_function(wrap_pyfunction!(chroma_offset, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_frame, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(psnr, m)?)?;
    m.add_function(wrap_pyfunction!(generate_clip, m)?)?;
    m.add_function(wrap_pyfunction!(read_yuv, m)?)?;
    m.add_function(wrap_pyfunction!(write_yuv, m)?)?;
    m.add_function(wrap_pyfunction!(curve_csv, m)?)?;
    m.add("EVALUATION_QPS", scpaq::qp::EVALUATION_QPS.to_vec())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argument_parsing() {
        assert_eq!(channel("Cb").unwrap(), Channel::Cb);
        assert!(channel("alpha").is_err());
        assert_eq!(model("idsq").unwrap(), Model::Idsq);
        assert!(model("x").is_err());
        assert_eq!(offset_mode("literal").unwrap(), OffsetMode::Literal);
        assert!(bit_depth(9).is_err());
    }
}

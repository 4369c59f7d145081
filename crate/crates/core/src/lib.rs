//! Perceptual quantization for 4:4:4 YCbCr video.
//!
//! Block means drive luminance and chrominance visibility thresholds, which
//! scale the luma and chroma quantization step sizes of each coding block.
//! The [`sim`] module runs a small transform/quantize/reconstruct loop so the
//! resulting QP maps can be compared against uniform quantization and against
//! the luma-only IDSQ anchor.

pub mod block;
pub mod cli;
mod error;
pub mod io;
pub mod jnd;
pub mod parallel;
pub mod qp;
pub mod sim;
pub mod synth;

pub use block::{analyze_frame, partition, BlockGrid, BlockRect, BlockSize, Channel, Plane, QpCell, QpMap, VideoFrame};
pub use error::{Error, Result};
pub use jnd::{block_mean, chroma_threshold, luma_threshold, BitDepth, BlockStats, MaskingParams};
pub use qp::{
    chroma_offset, perceptual_chroma_qp, perceptual_step, qp_from_step, qstep_from_qp, BlockQp, Model,
    OffsetMode, QpConfig,
};
pub use sim::{simulate, ChannelReport, SimConfig, SimReport};

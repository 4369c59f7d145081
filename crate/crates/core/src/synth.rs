//! Synthetic 4:4:4 test clips.
//!
//! Values are designed at 8 bits and scaled by `2^(b-8)` for deeper clips.
//! Every generator is seeded, so clips are reproducible byte for byte.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::block::{Plane, VideoFrame};
use crate::error::{Error, Result};
use crate::jnd::BitDepth;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClipKind {
    /// Every plane holds one constant value.
    Flat { y: u16, cb: u16, cr: u16 },
    /// Luma ramps left to right, Cb top to bottom, Cr along the diagonal.
    Gradient,
    /// 32x32 tiles alternating between dark, mid and bright levels with
    /// mild texture, drifting right by 4 pixels per frame.
    DarkBright,
}

impl fmt::Display for ClipKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClipKind::Flat { y, cb, cr } => write!(f, "flat({y},{cb},{cr})"),
            ClipKind::Gradient => f.write_str("gradient"),
            ClipKind::DarkBright => f.write_str("dark-bright"),
        }
    }
}

impl FromStr for ClipKind {
    type Err = Error;

    /// `flat`, `flat:V`, `flat:Y,CB,CR`, `gradient` or `dark-bright`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown clip kind '{s}'"));
        match s {
            "gradient" => return Ok(ClipKind::Gradient),
            "dark-bright" | "darkbright" => return Ok(ClipKind::DarkBright),
            "flat" => return Ok(ClipKind::Flat { y: 128, cb: 128, cr: 128 }),
            _ => {}
        }
        let values = s.strip_prefix("flat:").ok_or_else(bad)?;
        let parsed = values.split(',').map(|v| v.trim().parse::<u16>()).collect::<std::result::Result<Vec<_>, _>>();
        match parsed.map_err(|_| bad())?.as_slice() {
            [v] => Ok(ClipKind::Flat { y: *v, cb: *v, cr: *v }),
            [y, cb, cr] => Ok(ClipKind::Flat { y: *y, cb: *cb, cr: *cr }),
            _ => Err(bad()),
        }
    }
}

fn scale(v8: f64, bit_depth: BitDepth) -> f64 {
    v8 * bit_depth.range() / 256.0
}

fn to_sample(v: f64, bit_depth: BitDepth) -> u16 {
    v.round().clamp(0.0, f64::from(bit_depth.max_sample())) as u16
}

fn tile_level(tx: usize, ty: usize, plane: usize) -> f64 {
    // dark, bright, mid, very dark, very bright
    const LEVELS: [f64; 5] = [28.0, 214.0, 128.0, 10.0, 240.0];
    LEVELS[(tx + 2 * ty + plane) % LEVELS.len()]
}

pub fn generate_clip(
    kind: ClipKind,
    width: usize,
    height: usize,
    frames: usize,
    bit_depth: BitDepth,
    seed: u64,
) -> Result<Vec<VideoFrame>> {
    if width == 0 || height == 0 {
        return Err(Error::Dimensions("clip has zero width or height".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..frames)
        .map(|t| {
            let planes: Vec<Plane> = (0..3)
                .map(|p| {
                    let mut plane = Plane::filled(width, height, 0);
                    for y in 0..height {
                        for x in 0..width {
                            let v8 = match kind {
                                ClipKind::Flat { y: vy, cb, cr } => {
                                    plane.set(x, y, [vy, cb, cr][p]);
                                    continue;
                                }
                                ClipKind::Gradient => {
                                    let frac = match p {
                                        0 => x as f64 / width.max(2).saturating_sub(1) as f64,
                                        1 => y as f64 / height.max(2).saturating_sub(1) as f64,
                                        _ => (x + y) as f64 / (width + height).saturating_sub(2).max(1) as f64,
                                    };
                                    frac * 255.0
                                }
                                ClipKind::DarkBright => {
                                    let sx = x + 4 * t;
                                    tile_level(sx / 32, y / 32, p) + rng.gen_range(-6.0..=6.0)
                                }
                            };
                            plane.set(x, y, to_sample(scale(v8, bit_depth), bit_depth));
                        }
                    }
                    plane
                })
                .collect();
            let [y, cb, cr]: [Plane; 3] = planes.try_into().expect("three planes");
            VideoFrame::new(bit_depth, y, cb, cr)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::block::Channel;

    #[test]
    fn flat_clip() {
        let c = generate_clip(ClipKind::Flat { y: 16, cb: 20, cr: 30 }, 8, 8, 2, BitDepth::EIGHT, 0).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c[1].plane(Channel::Cr).data().iter().all(|&v| v == 30));
    }

    #[test]
    fn flat_rejects_out_of_range() {
        assert!(generate_clip(ClipKind::Flat { y: 300, cb: 0, cr: 0 }, 8, 8, 1, BitDepth::EIGHT, 0).is_err());
    }

    #[test]
    fn dark_bright_has_both_extremes() {
        let c = generate_clip(ClipKind::DarkBright, 128, 64, 1, BitDepth::EIGHT, 1).unwrap();
        let y = c[0].plane(Channel::Y).data();
        assert!(y.iter().any(|&v| v < 64));
        assert!(y.iter().any(|&v| v > 192));
    }

    #[test]
    fn reproducible_and_scaled() {
        let a = generate_clip(ClipKind::DarkBright, 64, 64, 2, BitDepth::TEN, 9).unwrap();
        let b = generate_clip(ClipKind::DarkBright, 64, 64, 2, BitDepth::TEN, 9).unwrap();
        assert_eq!(a, b);
        assert!(a[0].plane(Channel::Y).data().iter().any(|&v| v > 800));
        let g = generate_clip(ClipKind::Gradient, 256, 4, 1, BitDepth::EIGHT, 0).unwrap();
        assert_eq!(g[0].plane(Channel::Y).get(0, 0), 0);
        assert_eq!(g[0].plane(Channel::Y).get(255, 0), 255);
    }

    #[test]
    fn parse_kinds() {
        assert_eq!("gradient".parse::<ClipKind>().unwrap(), ClipKind::Gradient);
        assert_eq!("flat:16".parse::<ClipKind>().unwrap(), ClipKind::Flat { y: 16, cb: 16, cr: 16 });
        assert_eq!("flat:1,2,3".parse::<ClipKind>().unwrap(), ClipKind::Flat { y: 1, cb: 2, cr: 3 });
        assert!("flat:1,2".parse::<ClipKind>().is_err());
        assert!("noise".parse::<ClipKind>().is_err());
    }
}

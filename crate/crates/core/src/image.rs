//! 8-bit grayscale rasters and the pixel-level operations the share chain
//! is built from.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Row-major 8-bit grayscale image. `data.len() == width * height` always.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: u32, height: u32, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams(format!(
                "image dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width as usize * height as usize;
        if data.len() != expected {
            return Err(Error::InvalidParams(format!(
                "{width}x{height} image needs {expected} pixels, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn filled(width: u32, height: u32, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width as usize * height as usize])
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> u8) -> Result<Self> {
        let mut data = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn dims(&self) -> (u32, u32) {
        (self.width, self.height)
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn pixels(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, x: u32, y: u32) -> u8 {
        self.data[y as usize * self.width as usize + x as usize]
    }

    pub fn into_pixels(self) -> Vec<u8> {
        self.data
    }

    pub fn histogram(&self) -> [usize; 256] {
        let mut hist = [0usize; 256];
        for &p in &self.data {
            hist[p as usize] += 1;
        }
        hist
    }

    /// Same dimensions, new pixels. Caller guarantees the length.
    pub(crate) fn with_pixels(&self, data: Vec<u8>) -> Self {
        debug_assert_eq!(data.len(), self.data.len());
        Self {
            width: self.width,
            height: self.height,
            data,
        }
    }

    pub fn ensure_same_dims(&self, other: &GrayImage) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::DimensionMismatch {
                expected: self.dims(),
                found: other.dims(),
            });
        }
        Ok(())
    }

    /// Nearest-neighbour resample to `width` x `height`.
    pub fn resize_nearest(&self, width: u32, height: u32) -> Result<GrayImage> {
        if self.dims() == (width, height) {
            return Ok(self.clone());
        }
        let (sw, sh) = (self.width as u64, self.height as u64);
        GrayImage::from_fn(width, height, |x, y| {
            let sx = (x as u64 * sw / width as u64) as u32;
            let sy = (y as u64 * sh / height as u64) as u32;
            self.get(sx, sy)
        })
    }
}

impl fmt::Debug for GrayImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GrayImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("data", &format_args!("[{} bytes]", self.data.len()))
            .finish()
    }
}

/// Element-wise XOR of two equally sized images.
pub fn xor_images(a: &GrayImage, b: &GrayImage) -> Result<GrayImage> {
    a.ensure_same_dims(b)?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x ^ y).collect();
    Ok(a.with_pixels(data))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Left,
    Right,
}

/// Per-pixel bit transform applied to noisy shares.
///
/// `Reverse8` mirrors the bit order of each byte and is its own inverse, so
/// the left and right directions coincide. `Rotate(k)` is a circular shift
/// by `k` bits; left and right undo each other.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum BitTransform {
    #[default]
    Reverse8,
    Rotate(u8),
}

impl BitTransform {
    pub fn rotate(k: u8) -> Result<Self> {
        if (1..=7).contains(&k) {
            Ok(BitTransform::Rotate(k))
        } else {
            Err(Error::InvalidParams(format!(
                "rotation must be between 1 and 7 bits, got {k}"
            )))
        }
    }

    #[inline]
    pub fn apply_pixel(self, value: u8, direction: Direction) -> u8 {
        match (self, direction) {
            (BitTransform::Reverse8, _) => value.reverse_bits(),
            (BitTransform::Rotate(k), Direction::Left) => value.rotate_left(k as u32),
            (BitTransform::Rotate(k), Direction::Right) => value.rotate_right(k as u32),
        }
    }

    /// 256-entry lookup table for one direction.
    pub fn table(self, direction: Direction) -> [u8; 256] {
        let mut lut = [0u8; 256];
        for (v, slot) in lut.iter_mut().enumerate() {
            *slot = self.apply_pixel(v as u8, direction);
        }
        lut
    }
}

impl fmt::Display for BitTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BitTransform::Reverse8 => f.write_str("reverse8"),
            BitTransform::Rotate(k) => write!(f, "rotate:{k}"),
        }
    }
}

impl FromStr for BitTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "reverse8" => Ok(BitTransform::Reverse8),
            other => match other.strip_prefix("rotate:") {
                Some(k) => {
                    let k = k.parse::<u8>().map_err(|_| {
                        Error::InvalidParams(format!("bad rotation amount in {other:?}"))
                    })?;
                    BitTransform::rotate(k)
                }
                None => Err(Error::InvalidParams(format!(
                    "unknown bit transform {other:?} (expected reverse8 or rotate:K)"
                ))),
            },
        }
    }
}

impl Serialize for BitTransform {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BitTransform {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn bit_transform(img: &GrayImage, kind: BitTransform, direction: Direction) -> GrayImage {
    let lut = kind.table(direction);
    img.with_pixels(img.data.iter().map(|&p| lut[p as usize]).collect())
}

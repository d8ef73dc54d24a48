//! Uncompressed Windows BMP decoding to grayscale.
//!
//! Supports a `BITMAPINFOHEADER` (or any later, larger info header) with
//! `BI_RGB` compression and either an 8-bit palette or 24-bit BGR pixels.
//! Colour is reduced with integer luma `(299 R + 587 G + 114 B + 500) / 1000`.

use crate::{Error, GrayImage, Result};

const FILE_HEADER_LEN: usize = 14;
const INFO_HEADER_MIN: usize = 40;
const BI_RGB: u32 = 0;

#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    ((299 * r as u32 + 587 * g as u32 + 114 * b as u32 + 500) / 1000) as u8
}

fn u16_at(bytes: &[u8], at: usize) -> Result<u16> {
    bytes
        .get(at..at + 2)
        .map(|b| u16::from_le_bytes([b[0], b[1]]))
        .ok_or_else(|| Error::format(bytes.len(), "truncated BMP header"))
}

fn u32_at(bytes: &[u8], at: usize) -> Result<u32> {
    bytes
        .get(at..at + 4)
        .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
        .ok_or_else(|| Error::format(bytes.len(), "truncated BMP header"))
}

pub fn load_bmp(bytes: &[u8]) -> Result<GrayImage> {
    if bytes.get(..2) != Some(b"BM") {
        return Err(Error::format(0, "missing BMP signature"));
    }
    let data_offset = u32_at(bytes, 10)? as usize;
    let info_len = u32_at(bytes, FILE_HEADER_LEN)? as usize;
    if info_len < INFO_HEADER_MIN {
        return Err(Error::Unsupported(format!(
            "BMP info header of {info_len} bytes (need BITMAPINFOHEADER)"
        )));
    }
    let width = u32_at(bytes, 18)? as i32;
    let raw_height = u32_at(bytes, 22)? as i32;
    let bpp = u16_at(bytes, 28)?;
    let compression = u32_at(bytes, 30)?;
    let colors_used = u32_at(bytes, 46)?;

    if compression != BI_RGB {
        return Err(Error::Unsupported(format!(
            "compressed BMP (compression type {compression})"
        )));
    }
    if width <= 0 || raw_height == 0 || raw_height == i32::MIN {
        return Err(Error::format(
            18,
            format!("bad BMP dimensions {width}x{raw_height}"),
        ));
    }
    let top_down = raw_height < 0;
    let (w, h) = (width as usize, raw_height.unsigned_abs() as usize);

    let palette: Option<Vec<u8>> = match bpp {
        8 => {
            let entries = if colors_used == 0 {
                256
            } else {
                colors_used.min(256) as usize
            };
            let start = FILE_HEADER_LEN + info_len;
            let table = bytes
                .get(start..start + entries * 4)
                .ok_or_else(|| Error::format(bytes.len(), "truncated BMP palette"))?;
            Some(
                table
                    .chunks_exact(4)
                    .map(|e| luma(e[2], e[1], e[0]))
                    .collect(),
            )
        }
        24 => None,
        other => {
            return Err(Error::Unsupported(format!("{other}-bit BMP")));
        }
    };

    let bytes_per_pixel = bpp as usize / 8;
    let stride = (w * bytes_per_pixel).div_ceil(4) * 4;
    let needed = stride * h;
    let raster = bytes
        .get(data_offset..)
        .filter(|r| r.len() >= needed)
        .ok_or_else(|| {
            Error::format(
                bytes.len(),
                format!("truncated BMP raster: need {needed} bytes"),
            )
        })?;

    let mut data = Vec::with_capacity(w * h);
    for y in 0..h {
        let src_row = if top_down { y } else { h - 1 - y };
        let row = &raster[src_row * stride..src_row * stride + w * bytes_per_pixel];
        match &palette {
            Some(pal) => {
                for (x, &idx) in row.iter().enumerate() {
                    let gray = pal.get(idx as usize).copied().ok_or_else(|| {
                        Error::format(
                            data_offset + src_row * stride + x,
                            format!("palette index {idx} out of range"),
                        )
                    })?;
                    data.push(gray);
                }
            }
            None => data.extend(row.chunks_exact(3).map(|px| luma(px[2], px[1], px[0]))),
        }
    }
    GrayImage::new(w as u32, h as u32, data)
}

/// Builds an uncompressed BMP. Used to produce fixtures.
#[doc(hidden)]
pub fn encode_bmp(
    width: u32,
    height: u32,
    bpp: u16,
    pixels: &[u8],
    palette: &[[u8; 3]],
) -> Vec<u8> {
    let bytes_per_pixel = bpp as usize / 8;
    let row_len = width as usize * bytes_per_pixel;
    let stride = row_len.div_ceil(4) * 4;
    let palette_len = palette.len() * 4;
    let data_offset = FILE_HEADER_LEN + INFO_HEADER_MIN + palette_len;
    let file_len = data_offset + stride * height as usize;

    let mut out = Vec::with_capacity(file_len);
    out.extend_from_slice(b"BM");
    out.extend_from_slice(&(file_len as u32).to_le_bytes());
    out.extend_from_slice(&[0; 4]);
    out.extend_from_slice(&(data_offset as u32).to_le_bytes());
    out.extend_from_slice(&(INFO_HEADER_MIN as u32).to_le_bytes());
    out.extend_from_slice(&(width as i32).to_le_bytes());
    out.extend_from_slice(&(height as i32).to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&bpp.to_le_bytes());
    out.extend_from_slice(&BI_RGB.to_le_bytes());
    out.extend_from_slice(&((stride * height as usize) as u32).to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&2835i32.to_le_bytes());
    out.extend_from_slice(&(palette.len() as u32).to_le_bytes());
    out.extend_from_slice(&0u32.to_le_bytes());
    for &[r, g, b] in palette {
        out.extend_from_slice(&[b, g, r, 0]);
    }
    // Bottom-up rows.
    for y in (0..height as usize).rev() {
        out.extend_from_slice(&pixels[y * row_len..(y + 1) * row_len]);
        out.resize(out.len() + stride - row_len, 0);
    }
    out
}

//! PGM (Netpbm graymap) reading and writing.
//!
//! The reader accepts ASCII `P2` and binary `P5` with a maxval of at most
//! 255; `#` comments are allowed anywhere in the header. Samples are taken
//! as-is, no rescaling to 255 is done for smaller maxvals. The writer always
//! emits `P5` with maxval 255.

use crate::{Error, GrayImage, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_whitespace_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_whitespace_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if start >= self.bytes.len() {
                Error::format(start, format!("unexpected end of data reading {what}"))
            } else {
                Error::format(start, format!("expected decimal {what}"))
            });
        }
        // Digits only, so from_utf8 cannot fail; overflow can.
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<u32>().ok())
            .ok_or_else(|| Error::format(start, format!("{what} out of range")))
    }
}

pub fn load_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let ascii = match bytes {
        [b'P', b'2', ..] => true,
        [b'P', b'5', ..] => false,
        [b'P', _, ..] => return Err(Error::format(1, "only P2 and P5 graymaps are supported")),
        _ => return Err(Error::format(0, "missing PGM magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_whitespace_and_comments();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format(maxval_at, "zero image dimension"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::format(
            maxval_at,
            format!("maxval {maxval} not in 1..=255"),
        ));
    }
    let count = width as usize * height as usize;

    let data = if ascii {
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            let at = cur.pos;
            let v = cur.number("sample").map_err(|e| match e {
                Error::Format { offset, message } if offset >= bytes.len() => {
                    Error::format(offset, format!("truncated pixel payload: {message}"))
                }
                other => other,
            })?;
            if v > maxval {
                return Err(Error::format(
                    at,
                    format!("sample {v} exceeds maxval {maxval}"),
                ));
            }
            data.push(v as u8);
        }
        data
    } else {
        // Exactly one whitespace byte separates maxval from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(Error::format(cur.pos, "expected whitespace after maxval")),
            None => return Err(Error::format(cur.pos, "truncated pixel payload: no raster")),
        }
        let payload = &bytes[cur.pos..];
        if payload.len() < count {
            return Err(Error::format(
                bytes.len(),
                format!(
                    "truncated pixel payload: expected {count} bytes, found {}",
                    payload.len()
                ),
            ));
        }
        if let Some(i) = payload[..count].iter().position(|&v| u32::from(v) > maxval) {
            return Err(Error::format(
                cur.pos + i,
                format!("sample {} exceeds maxval {maxval}", payload[i]),
            ));
        }
        payload[..count].to_vec()
    };

    GrayImage::new(width, height, data)
}

pub fn save_pgm(img: &GrayImage) -> Vec<u8> {
    let header = format!("P5\n{} {}\n255\n", img.width(), img.height());
    let mut out = Vec::with_capacity(header.len() + img.len());
    out.extend_from_slice(header.as_bytes());
    out.extend_from_slice(img.pixels());
    out
}

//! Netpbm I/O: PGM (P5 binary, P2 ASCII) reading, P5 writing, and a P6 PPM
//! writer for the colored reconstruction. Maxval above 255 is rejected.

use crate::image::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (must be <= 255)")]
    UnsupportedMaxval(u32),
    #[error("truncated pixel data: expected {expected} values, got {got}")]
    TruncatedData { expected: usize, got: usize },
}

struct Tokens<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Tokens { bytes, pos: 0 }
    }

    /// Next whitespace-delimited token, skipping `#` comments to end of line.
    fn next(&mut self) -> Option<&'a [u8]> {
        loop {
            while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
            if self.pos >= self.bytes.len() {
                return None;
            }
            if self.bytes[self.pos] == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
                continue;
            }
            let start = self.pos;
            while self.pos < self.bytes.len()
                && !self.bytes[self.pos].is_ascii_whitespace()
                && self.bytes[self.pos] != b'#'
            {
                self.pos += 1;
            }
            return Some(&self.bytes[start..self.pos]);
        }
    }

    fn next_u32(&mut self, what: &str) -> Result<u32, PgmError> {
        let tok = self
            .next()
            .ok_or_else(|| PgmError::MalformedHeader(format!("missing {what}")))?;
        std::str::from_utf8(tok)
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::MalformedHeader(format!("invalid {what}")))
    }
}

/// Parses a P5 (binary) or P2 (ASCII) PGM with maxval <= 255.
pub fn read_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    let mut toks = Tokens::new(bytes);
    let magic = toks
        .next()
        .ok_or_else(|| PgmError::MalformedHeader("empty input".into()))?;
    let binary = match magic {
        b"P5" => true,
        b"P2" => false,
        other => {
            return Err(PgmError::MalformedHeader(format!(
                "unknown magic {:?}",
                String::from_utf8_lossy(other)
            )))
        }
    };
    let width = toks.next_u32("width")? as usize;
    let height = toks.next_u32("height")? as usize;
    let maxval = toks.next_u32("maxval")?;
    if width == 0 || height == 0 {
        return Err(PgmError::MalformedHeader("zero dimension".into()));
    }
    if maxval == 0 || maxval > 255 {
        return Err(PgmError::UnsupportedMaxval(maxval));
    }
    let n = width * height;

    let data = if binary {
        // Exactly one whitespace byte separates the header from raster data.
        let start = toks.pos + 1;
        if start > bytes.len() {
            return Err(PgmError::TruncatedData {
                expected: n,
                got: 0,
            });
        }
        let raster = &bytes[start..];
        if raster.len() < n {
            return Err(PgmError::TruncatedData {
                expected: n,
                got: raster.len(),
            });
        }
        raster[..n].to_vec()
    } else {
        let mut data = Vec::with_capacity(n);
        for i in 0..n {
            let v = match toks.next() {
                Some(tok) => std::str::from_utf8(tok)
                    .ok()
                    .and_then(|s| s.parse::<u32>().ok())
                    .ok_or_else(|| PgmError::MalformedHeader("invalid sample".into()))?,
                None => {
                    return Err(PgmError::TruncatedData {
                        expected: n,
                        got: i,
                    })
                }
            };
            if v > maxval {
                return Err(PgmError::MalformedHeader(format!(
                    "sample {v} exceeds maxval {maxval}"
                )));
            }
            data.push(v as u8);
        }
        data
    };

    GrayImage::from_raw(width, height, data)
        .map_err(|e| PgmError::MalformedHeader(e.to_string()))
}

/// Emits binary P5 with maxval 255.
pub fn write_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend_from_slice(img.data());
    out
}

/// Interleaved RGB raster for the colored reconstruction output.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, 3 bytes per pixel.
    pub data: Vec<u8>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        let mut data = Vec::with_capacity(width * height * 3);
        for _ in 0..width * height {
            data.extend_from_slice(&fill);
        }
        RgbImage {
            width,
            height,
            data,
        }
    }

    pub fn set(&mut self, x: usize, y: usize, rgb: [u8; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i..i + 3].copy_from_slice(&rgb);
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

/// Emits binary P6 with maxval 255.
pub fn write_ppm(img: &RgbImage) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.data);
    out
}

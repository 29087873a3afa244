//! Image value types and elementwise geometry/arithmetic operations.
//!
//! `GrayImage` is the currency of all filtering stages: 8-bit, single
//! channel, row-major. `BinaryMask` shares the same geometry and converts
//! to/from gray losslessly (false→0, true→255).

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ImageError {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("invalid image geometry: {0}")]
    InvalidGeometry(String),
}

/// 8-bit single-channel raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        assert!(width >= 1 && height >= 1, "empty image");
        GrayImage {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ImageError> {
        if width < 1 || height < 1 {
            return Err(ImageError::InvalidGeometry(format!(
                "{width}x{height} must be at least 1x1"
            )));
        }
        if data.len() != width * height {
            return Err(ImageError::InvalidGeometry(format!(
                "data length {} != {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(GrayImage {
            width,
            height,
            data,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut img = GrayImage::new(width, height, 0);
        for y in 0..height {
            for x in 0..width {
                img.data[y * width + x] = f(x, y);
            }
        }
        img
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: u8) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    /// Extracts the rectangle starting at (left, top), exact inverse of `pad`.
    pub fn crop(&self, left: usize, top: usize, width: usize, height: usize) -> GrayImage {
        assert!(left + width <= self.width && top + height <= self.height);
        let mut out = GrayImage::new(width, height, 0);
        for y in 0..height {
            let src = (top + y) * self.width + left;
            out.data[y * width..(y + 1) * width].copy_from_slice(&self.data[src..src + width]);
        }
        out
    }
}

/// Boolean raster of identical geometry to `GrayImage`; foreground = true.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<bool>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, fill: bool) -> Self {
        assert!(width >= 1 && height >= 1, "empty mask");
        BinaryMask {
            width,
            height,
            data: vec![fill; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut m = BinaryMask::new(width, height, false);
        for y in 0..height {
            for x in 0..width {
                m.data[y * width + x] = f(x, y);
            }
        }
        m
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.width
    }

    #[inline]
    pub fn height(&self) -> usize {
        self.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x]
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize, v: bool) {
        debug_assert!(x < self.width && y < self.height);
        self.data[y * self.width + x] = v;
    }

    #[inline]
    pub fn data(&self) -> &[bool] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [bool] {
        &mut self.data
    }

    /// Number of foreground pixels.
    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.data.iter().any(|&b| b)
    }

    pub fn to_gray(&self) -> GrayImage {
        GrayImage {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&b| if b { 255 } else { 0 }).collect(),
        }
    }

    /// Nonzero pixels become foreground; `to_gray` then `from_gray` is lossless.
    pub fn from_gray(img: &GrayImage) -> BinaryMask {
        BinaryMask {
            width: img.width,
            height: img.height,
            data: img.data.iter().map(|&v| v != 0).collect(),
        }
    }

    fn check_dims(&self, other: &BinaryMask) -> Result<(), ImageError> {
        if self.width != other.width || self.height != other.height {
            return Err(ImageError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }
}

/// Pads with `fill` on each side; original pixels land at offset (left, top).
pub fn pad(
    img: &GrayImage,
    top: usize,
    bottom: usize,
    left: usize,
    right: usize,
    fill: u8,
) -> GrayImage {
    let w = img.width + left + right;
    let h = img.height + top + bottom;
    let mut out = GrayImage::new(w, h, fill);
    for y in 0..img.height {
        let dst = (top + y) * w + left;
        let src = y * img.width;
        out.data[dst..dst + img.width].copy_from_slice(&img.data[src..src + img.width]);
    }
    out
}

/// Subtracts every pixel from white: p → 255 − p.
pub fn invert(img: &GrayImage) -> GrayImage {
    GrayImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&p| 255 - p).collect(),
    }
}

/// Multiplies by `gain`, rounding to nearest (ties away from zero) and
/// saturating at 255.
pub fn scale_saturating(img: &GrayImage, gain: f64) -> GrayImage {
    assert!(gain >= 0.0, "gain must be non-negative");
    let mut lut = [0u8; 256];
    for (v, slot) in lut.iter_mut().enumerate() {
        let scaled = (v as f64 * gain).round();
        *slot = if scaled >= 255.0 { 255 } else { scaled as u8 };
    }
    GrayImage {
        width: img.width,
        height: img.height,
        data: img.data.iter().map(|&p| lut[p as usize]).collect(),
    }
}

/// Pixelwise OR (saturating addition of binary images).
pub fn mask_union(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask, ImageError> {
    a.check_dims(b)?;
    Ok(BinaryMask {
        width: a.width,
        height: a.height,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| x || y).collect(),
    })
}

/// Pixelwise AND.
pub fn mask_intersection(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask, ImageError> {
    a.check_dims(b)?;
    Ok(BinaryMask {
        width: a.width,
        height: a.height,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| x && y).collect(),
    })
}

/// Pixelwise set difference a ∖ b.
pub fn mask_difference(a: &BinaryMask, b: &BinaryMask) -> Result<BinaryMask, ImageError> {
    a.check_dims(b)?;
    Ok(BinaryMask {
        width: a.width,
        height: a.height,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| x && !y).collect(),
    })
}

/// Pixelwise NOT.
pub fn complement(m: &BinaryMask) -> BinaryMask {
    BinaryMask {
        width: m.width,
        height: m.height,
        data: m.data.iter().map(|&b| !b).collect(),
    }
}

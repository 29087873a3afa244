//! Averaging (box) filtering in two border modes, plus the contrast
//! measurement that drives the intensification gain.

use crate::image::GrayImage;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FilterError {
    #[error("kernel side {0} must be odd")]
    EvenKernel(usize),
    #[error("kernel side {k} too large for {width}x{height} image")]
    KernelTooLarge {
        k: usize,
        width: usize,
        height: usize,
    },
}

/// Border handling for `box_blur`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlurMode {
    /// Output keeps input dimensions; windows hanging over the edge read
    /// zeros (the central part of a zero-padded correlation).
    SameZeroPad,
    /// Only windows fully inside the image; output shrinks to
    /// (h-k+1) x (w-k+1).
    ValidOnly,
}

/// Box blur via a summed-area table: O(pixels) regardless of `k`.
///
/// Every output pixel is the rounded mean of its k x k window. The divisor
/// is always k²(odd), so rounding to nearest never ties.
pub fn box_blur(img: &GrayImage, k: usize, mode: BlurMode) -> Result<GrayImage, FilterError> {
    if k % 2 == 0 || k < 3 {
        return Err(FilterError::EvenKernel(k));
    }
    let (w, h) = (img.width(), img.height());
    if k > w || k > h {
        return Err(FilterError::KernelTooLarge {
            k,
            width: w,
            height: h,
        });
    }

    // integral[y][x] = sum of pixels in [0,y) x [0,x)
    let iw = w + 1;
    let mut integral = vec![0u64; iw * (h + 1)];
    for y in 0..h {
        let mut row_sum = 0u64;
        for x in 0..w {
            row_sum += img.get(x, y) as u64;
            integral[(y + 1) * iw + (x + 1)] = integral[y * iw + (x + 1)] + row_sum;
        }
    }
    let window_sum = |x0: usize, y0: usize, x1: usize, y1: usize| -> u64 {
        integral[y1 * iw + x1] + integral[y0 * iw + x0]
            - integral[y0 * iw + x1]
            - integral[y1 * iw + x0]
    };

    let r = (k - 1) / 2;
    let k2 = (k * k) as u64;
    let round_mean = |sum: u64| -> u8 { ((sum + k2 / 2) / k2) as u8 };

    let out = match mode {
        BlurMode::SameZeroPad => GrayImage::from_fn(w, h, |x, y| {
            let x0 = x.saturating_sub(r);
            let y0 = y.saturating_sub(r);
            let x1 = (x + r + 1).min(w);
            let y1 = (y + r + 1).min(h);
            round_mean(window_sum(x0, y0, x1, y1))
        }),
        BlurMode::ValidOnly => GrayImage::from_fn(w - k + 1, h - k + 1, |x, y| {
            round_mean(window_sum(x, y, x + k, y + k))
        }),
    };
    Ok(out)
}

/// Robust contrast in [0,1]: (p95 - p5) / 255 over the intensity histogram,
/// percentiles by nearest rank. Constant images score 0.
pub fn contrast_index(img: &GrayImage) -> f64 {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    let n = img.data().len() as u64;
    let percentile = |q: f64| -> u8 {
        let rank = ((q * n as f64).ceil() as u64).max(1);
        let mut cum = 0u64;
        for (v, &c) in hist.iter().enumerate() {
            cum += c;
            if cum >= rank {
                return v as u8;
            }
        }
        255
    };
    let p5 = percentile(0.05);
    let p95 = percentile(0.95);
    (p95.saturating_sub(p5)) as f64 / 255.0
}

/// Maps contrast to the intensification gain: faint inputs need the
/// strongest boost. Affine, monotonically non-increasing, always in
/// [1.5, 5.5].
pub fn choose_gain(contrast: f64) -> f64 {
    let c = contrast.clamp(0.0, 1.0);
    (1.5 + 4.0 * (1.0 - c)).clamp(1.5, 5.5)
}

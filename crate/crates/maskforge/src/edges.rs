//! Sobel edge magnitude and global thresholding, including the automatic
//! (Otsu) threshold used wherever a fixed value is not configured.

use crate::image::{BinaryMask, GrayImage};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EdgeError {
    #[error("image {0}x{1} too small (needs at least 3x3)")]
    ImageTooSmall(usize, usize),
}

/// Which side of the threshold becomes foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarity {
    AboveOrEqual,
    Below,
}

/// |Gx| + |Gy| from the standard 3x3 Sobel kernels, clamped to 255.
/// Border pixels are 0. The L1 magnitude keeps everything in integers, so
/// results are identical across platforms.
pub fn sobel_magnitude(img: &GrayImage) -> Result<GrayImage, EdgeError> {
    let (w, h) = (img.width(), img.height());
    if w < 3 || h < 3 {
        return Err(EdgeError::ImageTooSmall(w, h));
    }
    let mut out = GrayImage::new(w, h, 0);
    for y in 1..h - 1 {
        for x in 1..w - 1 {
            let p = |dx: i32, dy: i32| -> i32 {
                img.get((x as i32 + dx) as usize, (y as i32 + dy) as usize) as i32
            };
            let gx = (p(1, -1) + 2 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2 * p(-1, 0) + p(-1, 1));
            let gy = (p(-1, 1) + 2 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2 * p(0, -1) + p(1, -1));
            out.set(x, y, (gx.abs() + gy.abs()).min(255) as u8);
        }
    }
    Ok(out)
}

/// Global threshold with explicit polarity.
pub fn threshold(img: &GrayImage, t: u8, keep: Polarity) -> BinaryMask {
    BinaryMask::from_fn(img.width(), img.height(), |x, y| match keep {
        Polarity::AboveOrEqual => img.get(x, y) >= t,
        Polarity::Below => img.get(x, y) < t,
    })
}

/// Otsu's threshold over a 256-bin histogram: the split below-t/at-or-above-t
/// maximizing between-class variance, ties toward the smaller t. Returns
/// None for an empty histogram; a single occupied bin returns that value.
pub fn otsu_from_histogram(hist: &[u64; 256]) -> Option<u8> {
    let total: u64 = hist.iter().sum();
    if total == 0 {
        return None;
    }
    let lo = hist.iter().position(|&c| c > 0).unwrap();
    let hi = hist.iter().rposition(|&c| c > 0).unwrap();
    if lo == hi {
        return Some(lo as u8);
    }

    let sum_total: u64 = hist.iter().enumerate().map(|(v, &c)| v as u64 * c).sum();
    let mut count_below = 0u64;
    let mut sum_below = 0u64;
    let mut best_t = 0u8;
    let mut best_var = -1.0f64;
    for t in 0..=255usize {
        // class 0: values < t; class 1: values >= t
        if t > 0 {
            count_below += hist[t - 1];
            sum_below += (t as u64 - 1) * hist[t - 1];
        }
        let count_above = total - count_below;
        if count_below == 0 || count_above == 0 {
            continue;
        }
        let w0 = count_below as f64;
        let w1 = count_above as f64;
        let m0 = sum_below as f64 / w0;
        let m1 = (sum_total - sum_below) as f64 / w1;
        let var = w0 * w1 * (m0 - m1) * (m0 - m1);
        if var > best_var {
            best_var = var;
            best_t = t as u8;
        }
    }
    Some(best_t)
}

/// Otsu's threshold of the image's intensity histogram. A constant image
/// returns its own value.
pub fn otsu_threshold(img: &GrayImage) -> u8 {
    let mut hist = [0u64; 256];
    for &v in img.data() {
        hist[v as usize] += 1;
    }
    otsu_from_histogram(&hist).expect("image is never empty")
}

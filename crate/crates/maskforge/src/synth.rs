//! Synthetic overlapped-impression fixtures with exact ground-truth masks.
//!
//! Single prints are oriented sinusoidal ridge gratings inside an elliptical
//! silhouette with a dark rim, fused by pixelwise minimum so overlapping
//! dark ridges accumulate the way inked latents do. Ground truth is taken
//! per transformed print before fusion, so it is exact by construction.

use crate::edges::{threshold, Polarity};
use crate::image::{mask_difference, mask_intersection, mask_union, BinaryMask, GrayImage};
use crate::morphology::fill_holes;
use crate::pgm::{read_pgm, write_pgm, PgmError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Poisson};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;
use thiserror::Error;

/// Pixels at or above this value count as background when extracting
/// silhouettes from transformed prints.
const SILHOUETTE_BG: u8 = 250;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("expected 2 or 3 prints, got {0}")]
    PrintCount(usize),
    #[error("prints {0} and {1} overlap by {2} px, below the {3} px minimum")]
    InsufficientOverlap(usize, usize, usize, usize),
    #[error("fixture i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture image: {0}")]
    Pgm(#[from] PgmError),
    #[error("fixture params: {0}")]
    Params(#[from] serde_json::Error),
}

/// Noise models applied to fused fixture images.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseKind {
    Gaussian { sigma: f64 },
    SaltPepper { density: f64 },
    Poisson,
    Speckle { variance: f64 },
}

/// Parameters of one generated ridge print, recorded for auditability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthPrintSpec {
    pub width: usize,
    pub height: usize,
    pub ridge_period: usize,
    pub orientation_deg: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrintParams {
    pub rotation_deg: f64,
    /// (dy, dx) of the print center relative to the canvas center.
    pub offset: (i32, i32),
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthPrintSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureParams {
    pub canvas: (usize, usize),
    pub prints: Vec<PrintParams>,
    pub noise: Option<NoiseKind>,
    pub seed: u64,
    /// True when some ground-truth region came out empty (e.g. identical
    /// prints fused in place).
    pub degenerate: bool,
}

/// A fused overlapped-impression image with exact ground-truth masks.
#[derive(Debug, Clone)]
pub struct OverlapFixture {
    pub image: GrayImage,
    pub gt_foreground: BinaryMask,
    pub gt_overlap: BinaryMask,
    pub gt_components: Vec<BinaryMask>,
    pub params: FixtureParams,
}

/// Renders an oriented sinusoidal ridge grating inside an elliptical
/// silhouette with a dark rim, on white. Ridges are dark; the rim closes
/// the silhouette so a dark-threshold plus hole fill recovers it solid.
pub fn synthetic_print(
    width: usize,
    height: usize,
    ridge_period: usize,
    orientation_deg: f64,
    seed: u64,
) -> GrayImage {
    assert!(ridge_period >= 4, "ridge_period must be at least 4");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // mild phase jitter: two low-frequency plane waves, in period units
    let mut wave = |amp_lo: f64, amp_hi: f64| {
        (
            rng.gen_range(amp_lo..amp_hi),
            rng.gen_range(0.004..0.02),
            rng.gen_range(0.004..0.02),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )
    };
    let w1 = wave(0.04, 0.09);
    let w2 = wave(0.02, 0.06);

    let (cx, cy) = (width as f64 / 2.0, height as f64 / 2.0);
    let (a, b) = (0.44 * width as f64, 0.46 * height as f64);
    let rim = 4.0 / a.min(b); // rim thickness ~4 px in normalized radius

    let theta = orientation_deg.to_radians();
    let (sin_o, cos_o) = (theta.sin(), theta.cos());
    let period = ridge_period as f64;
    const RIDGE_DARK: f64 = 18.0;

    GrayImage::from_fn(width, height, |x, y| {
        let (dx, dy) = (x as f64 - cx, y as f64 - cy);
        let rho = ((dx / a).powi(2) + (dy / b).powi(2)).sqrt();
        if rho > 1.0 {
            return 255;
        }
        if rho >= 1.0 - rim {
            return RIDGE_DARK as u8;
        }
        let jitter = w1.0 * (w1.1 * x as f64 + w1.2 * y as f64 + w1.3).sin()
            + w2.0 * (w2.1 * x as f64 + w2.2 * y as f64 + w2.3).sin();
        let t = (dx * cos_o + dy * sin_o) / period + jitter;
        let s = (std::f64::consts::TAU * t).sin();
        const CUT: f64 = 0.3;
        if s <= CUT {
            return 255;
        }
        let q = ((s - CUT) / (1.0 - CUT)).powf(0.55);
        (255.0 - q * (255.0 - RIDGE_DARK)).round() as u8
    })
}

/// Nearest-neighbor sample of `print` rotated about its center and placed
/// with its center at canvas center + offset. Out-of-print reads white.
fn transform_print(
    print: &GrayImage,
    rotation_deg: f64,
    offset: (i32, i32),
    canvas: (usize, usize),
) -> GrayImage {
    let (cw, ch) = canvas;
    let (ccx, ccy) = (cw as f64 / 2.0 + offset.1 as f64, ch as f64 / 2.0 + offset.0 as f64);
    let (pcx, pcy) = (print.width() as f64 / 2.0, print.height() as f64 / 2.0);
    let alpha = rotation_deg.to_radians();
    let (sin_a, cos_a) = (alpha.sin(), alpha.cos());
    GrayImage::from_fn(cw, ch, |x, y| {
        let (qx, qy) = (x as f64 - ccx, y as f64 - ccy);
        // inverse rotation back into print coordinates
        let px = cos_a * qx + sin_a * qy + pcx;
        let py = -sin_a * qx + cos_a * qy + pcy;
        let (ix, iy) = (px.round() as i64, py.round() as i64);
        if ix >= 0 && iy >= 0 && (ix as usize) < print.width() && (iy as usize) < print.height() {
            print.get(ix as usize, iy as usize)
        } else {
            255
        }
    })
}

/// Solid silhouette of a transformed print: dark threshold plus hole fill.
fn silhouette(transformed: &GrayImage) -> BinaryMask {
    fill_holes(&threshold(transformed, SILHOUETTE_BG, Polarity::Below))
}

/// Rotates, translates and fuses prints by pixelwise minimum, deriving
/// exact ground-truth masks from the per-print silhouettes.
pub fn compose_overlap(
    prints: &[GrayImage],
    rotations: &[f64],
    offsets: &[(i32, i32)],
    canvas: (usize, usize),
) -> Result<OverlapFixture, SynthError> {
    let n = prints.len();
    if !(2..=3).contains(&n) || rotations.len() != n || offsets.len() != n {
        return Err(SynthError::PrintCount(n));
    }
    let transformed: Vec<GrayImage> = (0..n)
        .map(|i| transform_print(&prints[i], rotations[i], offsets[i], canvas))
        .collect();
    let silhouettes: Vec<BinaryMask> = transformed.iter().map(silhouette).collect();

    let min_lens = canvas.0 * canvas.1 / 100;
    for i in 0..n {
        for j in i + 1..n {
            let lens = mask_intersection(&silhouettes[i], &silhouettes[j])
                .unwrap()
                .count();
            if lens < min_lens {
                return Err(SynthError::InsufficientOverlap(i, j, lens, min_lens));
            }
        }
    }

    let mut image = GrayImage::new(canvas.0, canvas.1, 255);
    for t in &transformed {
        for (dst, &src) in image.data_mut().iter_mut().zip(t.data()) {
            *dst = (*dst).min(src);
        }
    }

    let mut gt_foreground = silhouettes[0].clone();
    let mut gt_overlap = silhouettes[0].clone();
    for s in &silhouettes[1..] {
        gt_foreground = mask_union(&gt_foreground, s).unwrap();
        gt_overlap = mask_intersection(&gt_overlap, s).unwrap();
    }
    let gt_components: Vec<BinaryMask> = (0..n)
        .map(|i| {
            let mut others = BinaryMask::new(canvas.0, canvas.1, false);
            for (j, s) in silhouettes.iter().enumerate() {
                if j != i {
                    others = mask_union(&others, s).unwrap();
                }
            }
            mask_difference(&silhouettes[i], &others).unwrap()
        })
        .collect();

    let degenerate = gt_overlap.is_empty() || gt_components.iter().any(|c| c.is_empty());
    let params = FixtureParams {
        canvas,
        prints: (0..n)
            .map(|i| PrintParams {
                rotation_deg: rotations[i],
                offset: offsets[i],
                synth: None,
            })
            .collect(),
        noise: None,
        seed: 0,
        degenerate,
    };

    Ok(OverlapFixture {
        image,
        gt_foreground,
        gt_overlap,
        gt_components,
        params,
    })
}

/// Seeded noise; identical seeds give identical outputs.
pub fn add_noise(img: &GrayImage, kind: NoiseKind, seed: u64) -> GrayImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clamp = |v: f64| -> u8 { v.round().clamp(0.0, 255.0) as u8 };
    let mut out = img.clone();
    match kind {
        NoiseKind::Gaussian { sigma } => {
            if sigma <= 0.0 {
                return out;
            }
            let dist = Normal::new(0.0, sigma).expect("finite sigma");
            for p in out.data_mut() {
                *p = clamp(*p as f64 + dist.sample(&mut rng));
            }
        }
        NoiseKind::SaltPepper { density } => {
            if density <= 0.0 {
                return out;
            }
            for p in out.data_mut() {
                let u: f64 = rng.gen();
                if u < density / 2.0 {
                    *p = 0;
                } else if u < density {
                    *p = 255;
                }
            }
        }
        NoiseKind::Poisson => {
            for p in out.data_mut() {
                if *p == 0 {
                    continue;
                }
                let dist = Poisson::new(*p as f64).expect("positive mean");
                *p = dist.sample(&mut rng).min(255.0) as u8;
            }
        }
        NoiseKind::Speckle { variance } => {
            if variance <= 0.0 {
                return out;
            }
            let dist = Normal::new(0.0, variance.sqrt()).expect("finite variance");
            for p in out.data_mut() {
                let v = *p as f64;
                *p = clamp(v + v * dist.sample(&mut rng));
            }
        }
    }
    out
}

impl OverlapFixture {
    /// Applies noise to the fused image and records it in the params.
    pub fn apply_noise(&mut self, kind: NoiseKind, seed: u64) {
        self.image = add_noise(&self.image, kind, seed);
        self.params.noise = Some(kind);
        self.params.seed = seed;
    }
}

/// Count of canvas pixels inside both transformed ellipses, computed from
/// the ellipse equations alone (used to steer offsets while generating).
fn analytic_lens(
    axes: &[(f64, f64)],
    rotations: &[f64],
    offsets: &[(i32, i32)],
    canvas: (usize, usize),
    i: usize,
    j: usize,
) -> usize {
    let inside = |k: usize, x: f64, y: f64| -> bool {
        let (ccx, ccy) = (
            canvas.0 as f64 / 2.0 + offsets[k].1 as f64,
            canvas.1 as f64 / 2.0 + offsets[k].0 as f64,
        );
        let alpha = rotations[k].to_radians();
        let (qx, qy) = (x - ccx, y - ccy);
        let px = alpha.cos() * qx + alpha.sin() * qy;
        let py = -alpha.sin() * qx + alpha.cos() * qy;
        (px / axes[k].0).powi(2) + (py / axes[k].1).powi(2) <= 1.0
    };
    let mut count = 0;
    for y in 0..canvas.1 {
        for x in 0..canvas.0 {
            if inside(i, x as f64, y as f64) && inside(j, x as f64, y as f64) {
                count += 1;
            }
        }
    }
    count
}

/// Deterministic fixture recipe: seeded prints, rotations and offsets, with
/// the offset distance bisected until the silhouette overlap fraction lands
/// in [0.2, 0.5] of the smaller print (two prints) or all pairs overlap a
/// central region (three prints).
pub fn generate_fixture(
    seed: u64,
    n_prints: usize,
    canvas: (usize, usize),
) -> Result<OverlapFixture, SynthError> {
    if !(2..=3).contains(&n_prints) {
        return Err(SynthError::PrintCount(n_prints));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));
    let (cw, ch) = canvas;

    let (pw, ph) = if n_prints == 2 {
        (cw * 5 / 8, ch * 7 / 8)
    } else {
        (cw * 35 / 64, ch * 3 / 4)
    };
    let axes: Vec<(f64, f64)> = (0..n_prints)
        .map(|_| (0.44 * pw as f64, 0.46 * ph as f64))
        .collect();

    let base_orientation: f64 = rng.gen_range(0.0..180.0);
    let mut specs = Vec::new();
    let mut prints = Vec::new();
    for i in 0..n_prints {
        let spec = SynthPrintSpec {
            width: pw,
            height: ph,
            ridge_period: rng.gen_range(8..=11),
            orientation_deg: (base_orientation + i as f64 * rng.gen_range(55.0..75.0)) % 180.0,
            seed: seed.wrapping_add(101 * i as u64 + 7),
        };
        prints.push(synthetic_print(
            spec.width,
            spec.height,
            spec.ridge_period,
            spec.orientation_deg,
            spec.seed,
        ));
        specs.push(spec);
    }
    let rotations: Vec<f64> = (0..n_prints).map(|_| rng.gen_range(-20.0..20.0)).collect();

    let offsets = if n_prints == 2 {
        let target = rng.gen_range(0.26..0.42);
        let dy = rng.gen_range(-18i32..=18);
        let a = axes[0].0;
        let (mut lo, mut hi) = (0.5 * a, 2.2 * a);
        let mut d = a;
        for _ in 0..10 {
            d = (lo + hi) / 2.0;
            let offs = vec![(0, -(d / 2.0) as i32), (dy, (d / 2.0) as i32)];
            let lens = analytic_lens(&axes, &rotations, &offs, canvas, 0, 1);
            let min_area = std::f64::consts::PI * axes[0].0 * axes[0].1;
            let frac = lens as f64 / min_area;
            if frac > target {
                lo = d;
            } else {
                hi = d;
            }
        }
        vec![(0, -(d / 2.0) as i32), (dy, (d / 2.0) as i32)]
    } else {
        // triangle arrangement around the canvas center, pulled in until
        // all three share the middle
        let phase: f64 = rng.gen_range(0.0..120.0);
        let a = axes[0].0.min(axes[0].1);
        let mut rho = 0.62 * a;
        let place = |rho: f64| -> Vec<(i32, i32)> {
            (0..3)
                .map(|i| {
                    let ang = (phase + 120.0 * i as f64).to_radians();
                    ((rho * ang.sin()) as i32, (rho * ang.cos()) as i32)
                })
                .collect()
        };
        for _ in 0..10 {
            let offs = place(rho);
            let worst = (0..3)
                .flat_map(|i| ((i + 1)..3).map(move |j| (i, j)))
                .map(|(i, j)| analytic_lens(&axes, &rotations, &offs, canvas, i, j))
                .min()
                .unwrap();
            let min_area = std::f64::consts::PI * axes[0].0 * axes[0].1;
            let frac = worst as f64 / min_area;
            if frac < 0.20 {
                rho *= 0.9;
            } else if frac > 0.34 {
                rho *= 1.08;
            } else {
                break;
            }
        }
        place(rho)
    };

    let mut fixture = compose_overlap(&prints, &rotations, &offsets, canvas)?;
    fixture.params.seed = seed;
    for (p, spec) in fixture.params.prints.iter_mut().zip(specs) {
        p.synth = Some(spec);
    }
    Ok(fixture)
}

/// Writes `image.pgm`, `gt_foreground.pgm`, `gt_overlap.pgm`,
/// `gt_component_<i>.pgm` and `params.json` into `dir`.
pub fn save_fixture(dir: &Path, fixture: &OverlapFixture) -> Result<(), SynthError> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("image.pgm"), write_pgm(&fixture.image))?;
    fs::write(
        dir.join("gt_foreground.pgm"),
        write_pgm(&fixture.gt_foreground.to_gray()),
    )?;
    fs::write(
        dir.join("gt_overlap.pgm"),
        write_pgm(&fixture.gt_overlap.to_gray()),
    )?;
    for (i, c) in fixture.gt_components.iter().enumerate() {
        fs::write(
            dir.join(format!("gt_component_{i}.pgm")),
            write_pgm(&c.to_gray()),
        )?;
    }
    fs::write(
        dir.join("params.json"),
        serde_json::to_vec_pretty(&fixture.params)?,
    )?;
    Ok(())
}

/// Reads a fixture directory written by `save_fixture`.
pub fn load_fixture(dir: &Path) -> Result<OverlapFixture, SynthError> {
    let read_mask = |name: &str| -> Result<BinaryMask, SynthError> {
        let img = read_pgm(&fs::read(dir.join(name))?)?;
        Ok(BinaryMask::from_gray(&img))
    };
    let image = read_pgm(&fs::read(dir.join("image.pgm"))?)?;
    let gt_foreground = read_mask("gt_foreground.pgm")?;
    let gt_overlap = read_mask("gt_overlap.pgm")?;
    let mut gt_components = Vec::new();
    for i in 0.. {
        let name = format!("gt_component_{i}.pgm");
        if !dir.join(&name).exists() {
            break;
        }
        gt_components.push(read_mask(&name)?);
    }
    let params: FixtureParams = serde_json::from_slice(&fs::read(dir.join("params.json"))?)?;
    Ok(OverlapFixture {
        image,
        gt_foreground,
        gt_overlap,
        gt_components,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_is_deterministic_and_white_outside() {
        let a = synthetic_print(120, 140, 9, 30.0, 42);
        let b = synthetic_print(120, 140, 9, 30.0, 42);
        assert_eq!(a, b);
        // corners are well outside the ellipse
        for (x, y) in [(0, 0), (119, 0), (0, 139), (119, 139)] {
            assert!(a.get(x, y) >= 250);
        }
    }

    /// Mean autocorrelation at `lag` along rows (axis 0) or columns.
    fn autocorr(img: &GrayImage, lag: usize, along_rows: bool) -> f64 {
        // sample a central block safely inside the ellipse
        let (w, h) = (img.width(), img.height());
        let (x0, x1) = (w * 3 / 8, w * 5 / 8);
        let (y0, y1) = (h * 3 / 8, h * 5 / 8);
        let mut vals = Vec::new();
        let mut lagged = Vec::new();
        for y in y0..y1 {
            for x in x0..x1 {
                let (lx, ly) = if along_rows { (x + lag, y) } else { (x, y + lag) };
                if lx < x1 && ly < y1 {
                    vals.push(img.get(x, y) as f64);
                    lagged.push(img.get(lx, ly) as f64);
                }
            }
        }
        let n = vals.len() as f64;
        let (ma, mb) = (
            vals.iter().sum::<f64>() / n,
            lagged.iter().sum::<f64>() / n,
        );
        let mut num = 0.0;
        let (mut va, mut vb) = (0.0, 0.0);
        for (a, b) in vals.iter().zip(&lagged) {
            num += (a - ma) * (b - mb);
            va += (a - ma) * (a - ma);
            vb += (b - mb) * (b - mb);
        }
        num / (va.sqrt() * vb.sqrt()).max(1e-9)
    }

    #[test]
    fn orientation_transposes_ridge_statistics() {
        let period = 10;
        let horiz = synthetic_print(200, 200, period, 0.0, 7);
        let vert = synthetic_print(200, 200, period, 90.0, 7);
        // orientation 0 varies along x: anti-phase at half period along rows
        let h_row = autocorr(&horiz, period / 2, true);
        let h_col = autocorr(&horiz, period / 2, false);
        let v_row = autocorr(&vert, period / 2, true);
        let v_col = autocorr(&vert, period / 2, false);
        assert!(h_row < 0.0 && h_col > 0.5, "h_row={h_row} h_col={h_col}");
        assert!(v_col < 0.0 && v_row > 0.5, "v_row={v_row} v_col={v_col}");
    }

    #[test]
    fn fuse_takes_pixelwise_minimum() {
        let a = GrayImage::new(200, 200, 100);
        let b = GrayImage::new(200, 200, 200);
        // uniform "prints" count as fully dark, silhouettes cover everything
        let fx = compose_overlap(
            &[a, b],
            &[0.0, 0.0],
            &[(0, 0), (0, 0)],
            (200, 200),
        )
        .unwrap();
        assert!(fx.image.data().iter().all(|&p| p == 100));
    }

    #[test]
    fn identical_prints_in_place_are_degenerate_not_error() {
        let p = synthetic_print(160, 160, 9, 20.0, 5);
        let fx = compose_overlap(
            &[p.clone(), p],
            &[0.0, 0.0],
            &[(0, 0), (0, 0)],
            (200, 200),
        )
        .unwrap();
        assert!(fx.params.degenerate);
        assert!(fx.gt_components.iter().all(|c| c.is_empty()));
        assert_eq!(fx.gt_overlap, fx.gt_foreground);
    }

    #[test]
    fn disjoint_prints_are_rejected() {
        let p = synthetic_print(100, 100, 9, 20.0, 5);
        let err = compose_overlap(
            &[p.clone(), p],
            &[0.0, 0.0],
            &[(0, -80), (0, 80)],
            (300, 120),
        )
        .unwrap_err();
        assert!(matches!(err, SynthError::InsufficientOverlap(..)));
    }

    #[test]
    fn lens_area_matches_analytic_ellipse_intersection() {
        let p0 = synthetic_print(200, 220, 9, 10.0, 1);
        let p1 = synthetic_print(200, 220, 10, 80.0, 2);
        let offsets = [(0i32, -55i32), (0, 55)];
        let fx = compose_overlap(&[p0, p1], &[0.0, 0.0], &offsets, (360, 260)).unwrap();
        let axes = vec![(0.44 * 200.0, 0.46 * 220.0); 2];
        let expect = analytic_lens(&axes, &[0.0, 0.0], &offsets, (360, 260), 0, 1);
        let got = fx.gt_overlap.count();
        let err = (got as f64 - expect as f64).abs() / expect as f64;
        assert!(err <= 0.03, "analytic {expect}, measured {got}");
    }

    #[test]
    fn gt_partition_invariants_hold() {
        let fx = generate_fixture(3, 2, (320, 260)).unwrap();
        assert!(!fx.params.degenerate);
        let both = mask_intersection(&fx.gt_components[0], &fx.gt_components[1]).unwrap();
        assert!(both.is_empty());
        for c in &fx.gt_components {
            assert!(mask_intersection(c, &fx.gt_overlap).unwrap().is_empty());
            assert!(mask_difference(c, &fx.gt_foreground).unwrap().is_empty());
        }
        assert!(mask_difference(&fx.gt_overlap, &fx.gt_foreground)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn swapping_print_order_permutes_components_only() {
        let p0 = synthetic_print(170, 190, 9, 15.0, 11);
        let p1 = synthetic_print(170, 190, 10, 95.0, 12);
        let canvas = (320, 240);
        let fwd = compose_overlap(
            &[p0.clone(), p1.clone()],
            &[5.0, -4.0],
            &[(0, -45), (6, 45)],
            canvas,
        )
        .unwrap();
        let rev = compose_overlap(&[p1, p0], &[-4.0, 5.0], &[(6, 45), (0, -45)], canvas).unwrap();
        assert_eq!(fwd.image, rev.image);
        assert_eq!(fwd.gt_overlap, rev.gt_overlap);
        assert_eq!(fwd.gt_components[0], rev.gt_components[1]);
        assert_eq!(fwd.gt_components[1], rev.gt_components[0]);
    }

    #[test]
    fn noise_identities_and_extremes() {
        let img = synthetic_print(100, 100, 9, 45.0, 9);
        assert_eq!(add_noise(&img, NoiseKind::SaltPepper { density: 0.0 }, 1), img);
        assert_eq!(add_noise(&img, NoiseKind::Gaussian { sigma: 0.0 }, 1), img);
        let sp = add_noise(&img, NoiseKind::SaltPepper { density: 1.0 }, 1);
        assert!(sp.data().iter().all(|&p| p == 0 || p == 255));
    }

    #[test]
    fn noise_is_seed_deterministic() {
        let img = synthetic_print(80, 80, 8, 70.0, 3);
        for kind in [
            NoiseKind::Gaussian { sigma: 10.0 },
            NoiseKind::SaltPepper { density: 0.05 },
            NoiseKind::Poisson,
            NoiseKind::Speckle { variance: 0.04 },
        ] {
            let a = add_noise(&img, kind, 99);
            let b = add_noise(&img, kind, 99);
            assert_eq!(a, b);
            let c = add_noise(&img, kind, 100);
            assert_ne!(a, c, "{kind:?} must vary across seeds");
        }
    }

    #[test]
    fn gaussian_noise_statistics() {
        let img = GrayImage::new(1000, 1000, 128);
        let noisy = add_noise(&img, NoiseKind::Gaussian { sigma: 10.0 }, 77);
        let n = noisy.data().len() as f64;
        let mean = noisy.data().iter().map(|&p| p as f64).sum::<f64>() / n;
        assert!((mean - 128.0).abs() <= 1.0, "mean {mean}");
        let var = noisy
            .data()
            .iter()
            .map(|&p| (p as f64 - mean).powi(2))
            .sum::<f64>()
            / n;
        let std = var.sqrt();
        assert!((std - 10.0).abs() <= 1.5, "std {std}");
    }

    #[test]
    fn fixture_roundtrips_through_directory() {
        let fx = generate_fixture(8, 2, (300, 240)).unwrap();
        let dir = tempfile::tempdir().unwrap();
        save_fixture(dir.path(), &fx).unwrap();
        let loaded = load_fixture(dir.path()).unwrap();
        assert_eq!(loaded.image, fx.image);
        assert_eq!(loaded.gt_foreground, fx.gt_foreground);
        assert_eq!(loaded.gt_overlap, fx.gt_overlap);
        assert_eq!(loaded.gt_components, fx.gt_components);
        assert_eq!(loaded.params, fx.params);
    }
}

//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Oracles here are deliberately naive re-implementations, kept
//! independent of the library's optimized paths.

use maskforge::edges::{otsu_from_histogram, sobel_magnitude};
use maskforge::eval::{evaluate_all, EvalReport};
use maskforge::filters::{box_blur, BlurMode};
use maskforge::image::{
    complement, mask_difference, mask_intersection, mask_union, BinaryMask, GrayImage,
};
use maskforge::morphology::{
    area_open, dilate, erode, fill_holes, label_components, StructuringElement,
};
use maskforge::pipeline::{self, PipelineConfig, RegionMaskSet};
use maskforge::synth::{generate_fixture, NoiseKind, OverlapFixture};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::time::Instant;

fn criterion(n: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {n} ({name}): {} — {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} ({name}) failed: {detail}");
}

fn random_mask(rng: &mut ChaCha8Rng, w: usize, h: usize) -> BinaryMask {
    let density = rng.gen_range(0.15..0.55);
    BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density))
}

fn random_se(rng: &mut ChaCha8Rng) -> StructuringElement {
    match rng.gen_range(0..3) {
        0 => StructuringElement::square3(),
        1 => StructuringElement::line(2 * rng.gen_range(0..=6) + 1, rng.gen_range(0.0..180.0))
            .unwrap(),
        _ => StructuringElement::rect(2 * rng.gen_range(0..=3) + 1, 2 * rng.gen_range(0..=3) + 1)
            .unwrap(),
    }
}

// --- naive oracles -------------------------------------------------------

fn dilate_oracle(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width() as i32, m.height() as i32);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        se.offsets().iter().any(|&(dy, dx)| {
            let (qx, qy) = (x as i32 - dx, y as i32 - dy);
            qx >= 0 && qy >= 0 && qx < w && qy < h && m.get(qx as usize, qy as usize)
        })
    })
}

fn erode_oracle(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width() as i32, m.height() as i32);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        se.offsets().iter().all(|&(dy, dx)| {
            let (qx, qy) = (x as i32 + dx, y as i32 + dy);
            qx >= 0 && qy >= 0 && qx < w && qy < h && m.get(qx as usize, qy as usize)
        })
    })
}

/// Repeated 8-connected flood fill, labeling in raster order.
fn flood_label_oracle(m: &BinaryMask) -> (Vec<u32>, Vec<usize>) {
    let (w, h) = (m.width(), m.height());
    let mut labels = vec![0u32; w * h];
    let mut areas = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !m.get(sx, sy) || labels[sy * w + sx] != 0 {
                continue;
            }
            let label = areas.len() as u32 + 1;
            let mut area = 0;
            let mut stack = vec![(sx, sy)];
            labels[sy * w + sx] = label;
            while let Some((x, y)) = stack.pop() {
                area += 1;
                for dy in -1i32..=1 {
                    for dx in -1i32..=1 {
                        let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                            let (nx, ny) = (nx as usize, ny as usize);
                            if m.get(nx, ny) && labels[ny * w + nx] == 0 {
                                labels[ny * w + nx] = label;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
            areas.push(area);
        }
    }
    (labels, areas)
}

fn area_open_oracle(m: &BinaryMask, min_area: usize) -> BinaryMask {
    let (labels, areas) = flood_label_oracle(m);
    let mut out = BinaryMask::new(m.width(), m.height(), false);
    for (i, &l) in labels.iter().enumerate() {
        if l != 0 && areas[(l - 1) as usize] >= min_area {
            out.data_mut()[i] = true;
        }
    }
    out
}

fn fill_holes_oracle(m: &BinaryMask) -> BinaryMask {
    // flood background from every border pixel, 4-connected
    let (w, h) = (m.width(), m.height());
    let mut outside = vec![false; w * h];
    let mut stack = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if (x == 0 || y == 0 || x == w - 1 || y == h - 1) && !m.get(x, y) && !outside[y * w + x]
            {
                outside[y * w + x] = true;
                stack.push((x, y));
            }
        }
    }
    while let Some((x, y)) = stack.pop() {
        let neighbors = [
            (x.wrapping_sub(1), y),
            (x + 1, y),
            (x, y.wrapping_sub(1)),
            (x, y + 1),
        ];
        for (nx, ny) in neighbors {
            if nx < w && ny < h && !m.get(nx, ny) && !outside[ny * w + nx] {
                outside[ny * w + nx] = true;
                stack.push((nx, ny));
            }
        }
    }
    let mut out = BinaryMask::new(w, h, false);
    for (i, &o) in outside.iter().enumerate() {
        out.data_mut()[i] = !o;
    }
    out
}

#[test]
fn criterion_1_morphology_oracles() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE01);
    for case in 0..200 {
        let m = random_mask(&mut rng, 32, 32);
        let se = random_se(&mut rng);
        assert_eq!(dilate(&m, &se), dilate_oracle(&m, &se), "dilate case {case}");
        assert_eq!(erode(&m, &se), erode_oracle(&m, &se), "erode case {case}");
        let min_area = rng.gen_range(0..25);
        assert_eq!(
            area_open(&m, min_area),
            area_open_oracle(&m, min_area),
            "area_open case {case}"
        );
        assert_eq!(fill_holes(&m), fill_holes_oracle(&m), "fill_holes case {case}");
        let (labels, stats) = label_components(&m);
        let (oracle_labels, oracle_areas) = flood_label_oracle(&m);
        assert_eq!(labels.labels(), &oracle_labels[..], "labels case {case}");
        assert_eq!(
            stats.iter().map(|s| s.area).collect::<Vec<_>>(),
            oracle_areas,
            "areas case {case}"
        );
    }
    let elapsed = start.elapsed();
    criterion(
        1,
        "morphology oracle equivalence",
        elapsed.as_secs_f64() < 10.0,
        &format!("200 cases exact in {:.2}s", elapsed.as_secs_f64()),
    );
}

#[test]
fn criterion_2_duality() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE02);
    for case in 0..200 {
        let se = random_se(&mut rng);
        let r = se.radius();
        // content padded in from the border by more than the radius
        let margin = r + 1;
        let m = BinaryMask::from_fn(32, 32, |x, y| {
            x >= margin && y >= margin && x < 32 - margin && y < 32 - margin && rng.gen_bool(0.4)
        });
        let via_complement = complement(&dilate(&complement(&m), &se.reflect()));
        assert_eq!(via_complement, erode(&m, &se), "duality case {case}");
    }
    criterion(2, "complement-dilate-complement equals erosion", true, "200 cases exact");
}

#[test]
fn criterion_3_filter_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE03);
    let gx_k = [[-1i32, 0, 1], [-2, 0, 2], [-1, 0, 1]];
    let gy_k = [[-1i32, -2, -1], [0, 0, 0], [1, 2, 1]];
    for case in 0..50 {
        let img = GrayImage::from_fn(16, 16, |_, _| rng.gen());
        for k in [3usize, 5, 15] {
            for mode in [BlurMode::SameZeroPad, BlurMode::ValidOnly] {
                let got = box_blur(&img, k, mode).unwrap();
                let r = (k as i32 - 1) / 2;
                let k2 = (k * k) as u64;
                let oracle_at = |cx: i32, cy: i32| -> u8 {
                    let mut sum = 0u64;
                    for dy in -r..=r {
                        for dx in -r..=r {
                            let (x, y) = (cx + dx, cy + dy);
                            if x >= 0 && y >= 0 && x < 16 && y < 16 {
                                sum += img.get(x as usize, y as usize) as u64;
                            }
                        }
                    }
                    ((sum + k2 / 2) / k2) as u8
                };
                let expect = match mode {
                    BlurMode::SameZeroPad => {
                        GrayImage::from_fn(16, 16, |x, y| oracle_at(x as i32, y as i32))
                    }
                    BlurMode::ValidOnly => GrayImage::from_fn(16 - k + 1, 16 - k + 1, |x, y| {
                        oracle_at(x as i32 + r, y as i32 + r)
                    }),
                };
                assert_eq!(got, expect, "blur case {case} k {k} mode {mode:?}");
            }
        }
        let mag = sobel_magnitude(&img).unwrap();
        for y in 0..16usize {
            for x in 0..16usize {
                let expect = if x == 0 || y == 0 || x == 15 || y == 15 {
                    0
                } else {
                    let (mut gx, mut gy) = (0i32, 0i32);
                    for ky in 0..3 {
                        for kx in 0..3 {
                            let v = img.get(x + kx - 1, y + ky - 1) as i32;
                            gx += gx_k[ky][kx] * v;
                            gy += gy_k[ky][kx] * v;
                        }
                    }
                    (gx.abs() + gy.abs()).min(255) as u8
                };
                assert_eq!(mag.get(x, y), expect, "sobel case {case} at ({x},{y})");
            }
        }
    }
    criterion(3, "box blur and Sobel match naive correlation", true, "50 images exact");
}

#[test]
fn criterion_4_otsu_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE04);
    for case in 0..100 {
        let mut hist = [0u64; 256];
        for _ in 0..rng.gen_range(1..40) {
            hist[rng.gen_range(0..256)] += rng.gen_range(1..10_000);
        }
        // oracle: recompute class statistics from scratch per candidate
        let total: u64 = hist.iter().sum();
        let lo = hist.iter().position(|&c| c > 0).unwrap();
        let hi = hist.iter().rposition(|&c| c > 0).unwrap();
        let expect = if lo == hi {
            lo as u8
        } else {
            let mut best = (0u8, -1.0f64);
            for t in 0..=255usize {
                let (mut w0, mut s0, mut w1, mut s1) = (0u64, 0u64, 0u64, 0u64);
                for (v, &c) in hist.iter().enumerate() {
                    if v < t {
                        w0 += c;
                        s0 += v as u64 * c;
                    } else {
                        w1 += c;
                        s1 += v as u64 * c;
                    }
                }
                if w0 == 0 || w1 == 0 {
                    continue;
                }
                let m0 = s0 as f64 / w0 as f64;
                let m1 = s1 as f64 / w1 as f64;
                let var = w0 as f64 * w1 as f64 * (m0 - m1) * (m0 - m1);
                if var > best.1 {
                    best = (t as u8, var);
                }
            }
            debug_assert!(total > 0);
            best.0
        };
        assert_eq!(
            otsu_from_histogram(&hist),
            Some(expect),
            "otsu case {case}"
        );
    }
    criterion(4, "Otsu equals exhaustive variance argmax", true, "100 histograms exact");
}

// --- pipeline-level criteria ---------------------------------------------

fn clean_fixtures() -> Vec<(String, OverlapFixture)> {
    (0..10u64)
        .map(|seed| {
            (
                format!("clean_{seed:02}"),
                generate_fixture(seed, 2, (640, 480)).expect("fixture generation"),
            )
        })
        .collect()
}

fn grow(mask: &BinaryMask, p: usize) -> BinaryMask {
    BinaryMask::from_fn(mask.width() + 2 * p, mask.height() + 2 * p, |x, y| {
        x >= p && y >= p && x - p < mask.width() && y - p < mask.height() && mask.get(x - p, y - p)
    })
}

fn check_partition(set: &RegionMaskSet, cfg: &PipelineConfig) -> Result<(), String> {
    let dims = (set.foreground.width(), set.foreground.height());
    let mut all = vec![&set.overlap];
    all.extend(set.components.iter());
    for m in &all {
        if (m.width(), m.height()) != dims {
            return Err("mask dimensions differ".into());
        }
        if m.count() < cfg.min_region_area {
            return Err(format!("region below min area: {}", m.count()));
        }
        if !mask_difference(m, &set.foreground).unwrap().is_empty() {
            return Err("region escapes foreground".into());
        }
    }
    for i in 0..all.len() {
        for j in (i + 1)..all.len() {
            if !mask_intersection(all[i], all[j]).unwrap().is_empty() {
                return Err(format!("regions {i} and {j} intersect"));
            }
        }
    }
    if set.components.len() < 2 {
        return Err("fewer than two components".into());
    }
    Ok(())
}

#[test]
fn criterion_5_partition_invariants_and_coverage() {
    let cfg = PipelineConfig::default();
    let mut worst_coverage = f64::INFINITY;
    for (name, fx) in clean_fixtures() {
        let (set, _) = pipeline::run(&fx.image, &cfg, false)
            .unwrap_or_else(|e| panic!("{name}: pipeline failed: {e}"));
        if let Err(msg) = check_partition(&set, &cfg) {
            criterion(5, "partition invariants", false, &format!("{name}: {msg}"));
        }
        let gt_fg = grow(&fx.gt_foreground, cfg.pad);
        let mut predicted = set.overlap.clone();
        for c in &set.components {
            predicted = mask_union(&predicted, c).unwrap();
        }
        let coverage = mask_intersection(&predicted, &gt_fg).unwrap().count() as f64
            / gt_fg.count() as f64;
        worst_coverage = worst_coverage.min(coverage);
    }
    criterion(
        5,
        "partition invariants and coverage",
        worst_coverage >= 0.90,
        &format!("10 clean fixtures, worst coverage {worst_coverage:.3}"),
    );
}

#[test]
fn criterion_6_two_print_segmentation_quality() {
    let cfg = PipelineConfig::default();
    let mut successes = 0;
    let mut lines = Vec::new();
    for (name, fx) in clean_fixtures() {
        // fixture sanity: silhouette overlap within the stated band
        let min_sil = fx.gt_components.iter().map(|c| c.count()).min().unwrap()
            + fx.gt_overlap.count();
        let frac = fx.gt_overlap.count() as f64 / min_sil as f64;
        assert!(
            (0.20..=0.50).contains(&frac),
            "{name}: overlap fraction {frac:.2} outside 20-50%"
        );

        let report = maskforge::eval::evaluate(&name, &fx, &cfg);
        let ok = report.status == "ok"
            && report.overlap_iou.unwrap_or(0.0) >= 0.5
            && report.component_ious.len() == 2
            && report.component_ious.iter().all(|&v| v >= 0.6);
        if ok {
            successes += 1;
        }
        lines.push(format!(
            "{name}: {} overlap_iou={:.3} component_ious={:?}",
            report.status,
            report.overlap_iou.unwrap_or(0.0),
            report.component_ious
        ));
    }
    for l in &lines {
        println!("  {l}");
    }
    criterion(
        6,
        "two-print segmentation quality",
        successes >= 9,
        &format!("{successes}/10 fixtures at overlap IoU >= 0.5 and component IoU >= 0.6"),
    );
}

#[test]
fn criterion_7_three_print_support() {
    let cfg = PipelineConfig::default();
    let mut pass = true;
    let mut details = Vec::new();
    for seed in [100u64, 101, 102] {
        let fx = generate_fixture(seed, 3, (640, 480)).expect("three-print fixture");
        match pipeline::run(&fx.image, &cfg, false) {
            Err(e) => {
                pass = false;
                details.push(format!("seed {seed}: {e}"));
            }
            Ok((set, _)) => {
                let partition = check_partition(&set, &cfg);
                if set.components.len() < 3 || partition.is_err() {
                    pass = false;
                }
                details.push(format!(
                    "seed {seed}: {} components, partition {}",
                    set.components.len(),
                    partition.map(|_| "ok".to_string()).unwrap_or_else(|e| e)
                ));
            }
        }
    }
    criterion(7, "three-print support", pass, &details.join("; "));
}

#[test]
fn criterion_8_noise_robustness() {
    let cfg = PipelineConfig::default();
    let kinds = [
        ("gaussian sigma=10", NoiseKind::Gaussian { sigma: 10.0 }),
        ("salt-pepper 0.02", NoiseKind::SaltPepper { density: 0.02 }),
        ("poisson", NoiseKind::Poisson),
        ("speckle var=0.04", NoiseKind::Speckle { variance: 0.04 }),
    ];
    let mut pass = true;
    let mut details = Vec::new();
    for (label, kind) in kinds {
        let mut ok = 0;
        for (name, fx) in clean_fixtures().iter_mut() {
            fx.apply_noise(kind, 5000 + name.len() as u64);
            if let Ok((set, _)) = pipeline::run(&fx.image, &cfg, false) {
                if check_partition(&set, &cfg).is_ok() {
                    ok += 1;
                }
            }
        }
        if ok < 7 {
            pass = false;
        }
        details.push(format!("{label}: {ok}/10"));
    }
    criterion(8, "noise robustness", pass, &details.join(", "));
}

#[test]
fn criterion_9_runtime() {
    let cfg = PipelineConfig::default();
    let fixtures = clean_fixtures();
    let report = evaluate_all(&fixtures, &cfg, 1);
    let median = report
        .aggregate
        .median_runtime_ms
        .expect("at least one fixture succeeded");
    criterion(
        9,
        "median runtime per 640x480 fixture",
        median <= 3000.0,
        &format!("median {median} ms (limit 3000 ms), recorded in the eval report"),
    );
}

#[test]
fn criterion_10_determinism() {
    let cfg = PipelineConfig::default();
    let fixtures = clean_fixtures();
    let a = evaluate_all(&fixtures, &cfg, 2);
    let b = evaluate_all(&fixtures, &cfg, 1);
    let strip = |r: &EvalReport| -> Vec<u8> {
        let mut r = r.clone();
        for f in &mut r.fixtures {
            f.runtime_ms = 0;
        }
        r.aggregate.mean_runtime_ms = None;
        r.aggregate.median_runtime_ms = None;
        serde_json::to_vec_pretty(&r).unwrap()
    };
    criterion(
        10,
        "evaluation determinism",
        strip(&a) == strip(&b),
        "two runs byte-identical apart from runtime fields",
    );
}

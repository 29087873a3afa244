//! The end-to-end region-masking pipeline: pre-process, extract the
//! foreground and the overlap, bridge the gap between them with an
//! automatically chosen angled line dilation, trace and fill the per-finger
//! cells, undo the dilation, and emit the mask set plus a color-coded
//! reconstruction.

use crate::edges::{otsu_from_histogram, otsu_threshold, sobel_magnitude, threshold, Polarity};
use crate::filters::{box_blur, choose_gain, contrast_index, BlurMode};
use crate::image::{
    invert, mask_difference, mask_intersection, mask_union, pad, scale_saturating, BinaryMask,
    GrayImage,
};
use crate::morphology::{
    area_open, dilate, erode, erode_via_complement, fill_holes, label_components, line_offset,
    select_components, StructuringElement,
};
use crate::pgm::RgbImage;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PipelineError {
    #[error("image {width}x{height} too small; pipeline needs at least {min}x{min}")]
    ImageTooSmall {
        width: usize,
        height: usize,
        min: usize,
    },
    #[error("no overlapped region found after thresholding the intensified image")]
    NoOverlapFound,
    #[error("no foreground found; the image may be blank")]
    NoForeground,
    #[error("no line dilation within bounds splits the foreground interior")]
    BridgeFailed,
    #[error("only {found} finger regions survived; need at least 2")]
    TooFewRegions { found: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
}

impl PipelineError {
    /// Stable short name, used as the status string in evaluation reports.
    pub fn name(&self) -> &'static str {
        match self {
            PipelineError::ImageTooSmall { .. } => "ImageTooSmall",
            PipelineError::NoOverlapFound => "NoOverlapFound",
            PipelineError::NoForeground => "NoForeground",
            PipelineError::BridgeFailed => "BridgeFailed",
            PipelineError::TooFewRegions { .. } => "TooFewRegions",
            PipelineError::InvalidConfig(_) => "InvalidConfig",
        }
    }
}

/// Every tunable of the pipeline, with the defaults used throughout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    /// Pixels of white padding added on every side before processing.
    pub pad: usize,
    /// Averaging-filter side length, odd, in [3, 41].
    pub blur_k: usize,
    /// Fixed intensification gain in [1.5, 5.5]; defaults to contrast-driven.
    pub gain_override: Option<f64>,
    /// Fixed threshold for the intensified image; defaults to Otsu over its
    /// nonzero pixels.
    pub overlap_thresh_override: Option<u8>,
    /// Fixed dark threshold for the input; defaults to Otsu.
    pub fg_thresh_override: Option<u8>,
    /// Minimum component area kept when cleaning the foreground mask.
    pub area_open_min: usize,
    /// Angle grid spacing for the line search; must divide 180.
    pub angle_step: usize,
    /// Line-length search: first odd length tried.
    pub line_len_start: usize,
    /// Line-length search increment; even, so lengths stay odd.
    pub line_len_step: usize,
    /// Line-length search: largest odd length tried.
    pub line_len_max: usize,
    /// Minimum perimeter for an edge component to count as a region trace.
    pub min_perimeter: usize,
    /// Minimum area for a region mask (and for interior cells during the
    /// bridge search).
    pub min_region_area: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            pad: 32,
            blur_k: 15,
            gain_override: None,
            overlap_thresh_override: None,
            fg_thresh_override: None,
            area_open_min: 200,
            angle_step: 15,
            line_len_start: 5,
            line_len_step: 4,
            line_len_max: 101,
            min_perimeter: 40,
            min_region_area: 300,
        }
    }
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<(), PipelineError> {
        let bad = |msg: String| Err(PipelineError::InvalidConfig(msg));
        if self.blur_k % 2 == 0 || !(3..=41).contains(&self.blur_k) {
            return bad(format!("blur_k {} must be odd and in [3,41]", self.blur_k));
        }
        if let Some(g) = self.gain_override {
            if !(1.5..=5.5).contains(&g) {
                return bad(format!("gain_override {g} outside [1.5, 5.5]"));
            }
        }
        if self.angle_step == 0 || 180 % self.angle_step != 0 {
            return bad(format!("angle_step {} must divide 180", self.angle_step));
        }
        if self.line_len_start % 2 == 0 || self.line_len_start == 0 {
            return bad(format!(
                "line_len_start {} must be odd",
                self.line_len_start
            ));
        }
        if self.line_len_max % 2 == 0 || self.line_len_max < self.line_len_start {
            return bad(format!(
                "line_len_max {} must be odd and >= line_len_start",
                self.line_len_max
            ));
        }
        if self.line_len_step == 0 || self.line_len_step % 2 != 0 {
            return bad(format!(
                "line_len_step {} must be even and positive",
                self.line_len_step
            ));
        }
        Ok(())
    }
}

/// Automatically chosen parameters of a run; pinning the overridable ones
/// back into the config reproduces the output exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub gain: f64,
    pub overlap_threshold: u8,
    pub fg_threshold: u8,
    pub angle_deg: f64,
    pub line_len: usize,
}

/// Pipeline output: all masks share the padded input's dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct RegionMaskSet {
    pub foreground: BinaryMask,
    pub overlap: BinaryMask,
    /// One mask per finger, at least two, pairwise disjoint and disjoint
    /// from `overlap`.
    pub components: Vec<BinaryMask>,
    pub provenance: Provenance,
}

/// Intermediate images keyed by stage letter, in execution order.
#[derive(Debug, Clone, Default)]
pub struct StageTrace {
    stages: Vec<(String, GrayImage)>,
}

impl StageTrace {
    fn push(&mut self, key: &str, img: GrayImage) {
        self.stages.push((key.to_string(), img));
    }

    pub fn stages(&self) -> &[(String, GrayImage)] {
        &self.stages
    }

    pub fn get(&self, key: &str) -> Option<&GrayImage> {
        self.stages.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

const MIN_INPUT_SIDE: usize = 64;

pub struct Preprocessed {
    pub padded_input: GrayImage,
    pub blurred: GrayImage,
    pub intensified: GrayImage,
    pub gain: f64,
}

/// Pads with white, blurs, inverts, blurs again (valid region only, then
/// re-centered), and amplifies by the contrast-driven gain. The overlapped
/// region comes out brighter than the rest of the print.
///
/// The padding frame of the intensified image is forced to zero: the frame
/// is background by construction, and the zero-padded first blur would
/// otherwise leave a bright halo there after inversion.
pub fn preprocess(img: &GrayImage, cfg: &PipelineConfig) -> Result<Preprocessed, PipelineError> {
    if img.width() < MIN_INPUT_SIDE || img.height() < MIN_INPUT_SIDE {
        return Err(PipelineError::ImageTooSmall {
            width: img.width(),
            height: img.height(),
            min: MIN_INPUT_SIDE,
        });
    }
    let p = cfg.pad;
    let padded_input = pad(img, p, p, p, p, 255);
    let blurred = box_blur(&padded_input, cfg.blur_k, BlurMode::SameZeroPad)
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    let inverted = invert(&blurred);
    let valid = box_blur(&inverted, cfg.blur_k, BlurMode::ValidOnly)
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    let r = (cfg.blur_k - 1) / 2;
    let recentered = pad(&valid, r, r, r, r, 0);
    let gain = cfg
        .gain_override
        .unwrap_or_else(|| choose_gain(contrast_index(img)));
    let mut intensified = scale_saturating(&recentered, gain);
    let (w, h) = (intensified.width(), intensified.height());
    for y in 0..h {
        for x in 0..w {
            if x < p || y < p || x >= w - p || y >= h - p {
                intensified.set(x, y, 0);
            }
        }
    }
    Ok(Preprocessed {
        padded_input,
        blurred,
        intensified,
        gain,
    })
}

/// Thresholds the intensified image (Otsu over its nonzero pixels unless
/// overridden), opens small components away, and keeps the single largest.
pub fn extract_overlap_mask(
    intensified: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<(BinaryMask, u8), PipelineError> {
    let t = match cfg.overlap_thresh_override {
        Some(t) => t,
        None => {
            let mut hist = [0u64; 256];
            for &v in intensified.data() {
                if v != 0 {
                    hist[v as usize] += 1;
                }
            }
            otsu_from_histogram(&hist).ok_or(PipelineError::NoOverlapFound)?
        }
    };
    let mask = threshold(intensified, t.max(1), Polarity::AboveOrEqual);
    let opened = area_open(&mask, cfg.min_region_area);
    let (labels, stats) = label_components(&opened);
    let largest = stats
        .iter()
        .max_by_key(|s| (s.area, std::cmp::Reverse(s.label)))
        .ok_or(PipelineError::NoOverlapFound)?;
    Ok((labels.mask_of(largest.label), t))
}

/// Thresholds dark pixels of the padded input (Otsu unless overridden),
/// opens away noise, and fills holes into a solid silhouette.
pub fn extract_foreground_mask(
    padded_input: &GrayImage,
    cfg: &PipelineConfig,
) -> Result<(BinaryMask, u8), PipelineError> {
    let t = cfg
        .fg_thresh_override
        .unwrap_or_else(|| otsu_threshold(padded_input));
    let mask = threshold(padded_input, t, Polarity::Below);
    let opened = area_open(&mask, cfg.area_open_min);
    if opened.is_empty() {
        return Err(PipelineError::NoForeground);
    }
    Ok((fill_holes(&opened), t))
}

/// Silhouette outline: the foreground minus its erosion.
pub fn boundary_ring(foreground: &BinaryMask) -> BinaryMask {
    mask_difference(foreground, &erode(foreground, &StructuringElement::square3())).unwrap()
}

pub struct BridgeOutcome {
    pub bridged: BinaryMask,
    pub angle_deg: f64,
    pub line_len: usize,
}

/// OR of `src` translated by (dy, dx) into `acc`.
fn or_translate(acc: &mut BinaryMask, src: &BinaryMask, dy: i32, dx: i32) {
    let (w, h) = (src.width() as i32, src.height() as i32);
    let (y0, y1) = (dy.max(0), (h + dy).min(h));
    let (x0, x1) = (dx.max(0), (w + dx).min(w));
    if y0 >= y1 || x0 >= x1 {
        return;
    }
    let data = acc.data_mut();
    for y in y0..y1 {
        let src_row = ((y - dy) * w - dx) as isize;
        let dst_row = (y * w) as usize;
        for x in x0..x1 {
            if src.data()[(src_row + x as isize) as usize] {
                data[dst_row + x as usize] = true;
            }
        }
    }
}

/// Number of 8-connected components of `m` with at least `min_area` pixels.
fn count_cells(m: &BinaryMask, min_area: usize) -> usize {
    let (w, h) = (m.width(), m.height());
    let mut seen = vec![false; w * h];
    let mut count = 0;
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for sy in 0..h {
        for sx in 0..w {
            if !m.get(sx, sy) || seen[sy * w + sx] {
                continue;
            }
            let mut area = 0usize;
            seen[sy * w + sx] = true;
            stack.push((sx, sy));
            while let Some((x, y)) = stack.pop() {
                area += 1;
                for dy in -1i32..=1 {
                    for dx in -1i32..=1 {
                        let (nx, ny) = (x as i32 + dx, y as i32 + dy);
                        if nx >= 0 && ny >= 0 && (nx as usize) < w && (ny as usize) < h {
                            let (nx, ny) = (nx as usize, ny as usize);
                            if m.get(nx, ny) && !seen[ny * w + nx] {
                                seen[ny * w + nx] = true;
                                stack.push((nx, ny));
                            }
                        }
                    }
                }
            }
            if area >= min_area {
                count += 1;
            }
        }
    }
    count
}

/// Searches angles and odd line lengths for the smallest dilation of the
/// overlap that cuts the foreground interior into at least two cells, i.e.
/// makes the overlap touch the silhouette on both sides. At the accepted
/// length the angle splitting into the most cells wins, and the length is
/// then extended while extra cells keep appearing (three-print inputs).
pub fn bridge_gap(
    overlap: &BinaryMask,
    foreground: &BinaryMask,
    cfg: &PipelineConfig,
) -> Result<BridgeOutcome, PipelineError> {
    let overlap = mask_intersection(overlap, foreground).unwrap();
    if overlap.is_empty() {
        return Err(PipelineError::NoOverlapFound);
    }
    // Thicken the seed so the bridged necks stay wide enough for the edge
    // tracer to keep the cells on either side separate.
    let fat = dilate(&overlap, &StructuringElement::rect(5, 5).unwrap());
    let boundary = boundary_ring(foreground);
    let interior = erode(foreground, &StructuringElement::square3());

    let angles: Vec<f64> = (0..180 / cfg.angle_step)
        .map(|i| (i * cfg.angle_step) as f64)
        .collect();

    // per-angle accumulator: fat overlap dilated by the line prefix so far
    let mut acc: Vec<BinaryMask> = vec![fat.clone(); angles.len()];
    let mut radius_done: Vec<i32> = vec![0; angles.len()];

    let cells_for = |candidate: &BinaryMask| -> usize {
        let cells = mask_difference(&interior, candidate).unwrap();
        count_cells(&cells, cfg.min_region_area)
    };
    let advance = |acc: &mut BinaryMask, done: &mut i32, angle: f64, len: usize| {
        let r = (len as i32 - 1) / 2;
        for t in (*done + 1)..=r {
            for s in [t, -t] {
                let (dy, dx) = line_offset(s, angle);
                or_translate(acc, &fat, dy, dx);
            }
        }
        *done = (*done).max(r);
    };

    let mut len = cfg.line_len_start;
    loop {
        let mut best: Option<(usize, usize)> = None; // (cells, angle index)
        for (ai, &angle) in angles.iter().enumerate() {
            advance(&mut acc[ai], &mut radius_done[ai], angle, len);
            let candidate = mask_union(&boundary, &acc[ai]).unwrap();
            let n = cells_for(&candidate);
            if n >= 2 && best.is_none_or(|(bn, _)| n > bn) {
                best = Some((n, ai));
            }
        }
        if let Some((mut n_cells, ai)) = best {
            let angle = angles[ai];
            // greedy extension: longer lines only if they free more cells
            while len + cfg.line_len_step <= cfg.line_len_max {
                let next = len + cfg.line_len_step;
                let mut probe = acc[ai].clone();
                let mut done = radius_done[ai];
                advance(&mut probe, &mut done, angle, next);
                let candidate = mask_union(&boundary, &probe).unwrap();
                let n = cells_for(&candidate);
                if n > n_cells {
                    acc[ai] = probe;
                    radius_done[ai] = done;
                    len = next;
                    n_cells = n;
                } else {
                    break;
                }
            }
            let bridged = mask_union(&boundary, &acc[ai]).unwrap();
            return Ok(BridgeOutcome {
                bridged,
                angle_deg: angle,
                line_len: len,
            });
        }
        if len + cfg.line_len_step > cfg.line_len_max {
            return Err(PipelineError::BridgeFailed);
        }
        len += cfg.line_len_step;
    }
}

/// Morphological closing: dilate then erode with the same element, the
/// erosion done the invert-dilate-invert way. Closing is idempotent, so
/// every mask that leaves the splitter is stable under a further
/// dilate-erode round.
fn close_with(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    erode_via_complement(&dilate(m, se), se)
}

pub struct SplitOutcome {
    /// Overlap-zone region first, then one mask per finger cell.
    pub regions: Vec<BinaryMask>,
    /// Binarized Sobel edges, for tracing.
    pub edges: BinaryMask,
}

/// Traces the bridged image's Sobel edges, fills each closed per-cell trace
/// into a solid region, carves the overlap zone out of what remains, and
/// nullifies the bridging dilation with the matching line erosion.
pub fn split_regions(
    bridged: &BinaryMask,
    angle_deg: f64,
    line_len: usize,
    cfg: &PipelineConfig,
) -> Result<SplitOutcome, PipelineError> {
    let line = StructuringElement::line(line_len, angle_deg)
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    let solid = fill_holes(bridged);
    let interior = erode(&solid, &StructuringElement::square3());

    let magnitude = sobel_magnitude(&bridged.to_gray())
        .map_err(|e| PipelineError::InvalidConfig(e.to_string()))?;
    let edges = threshold(&magnitude, 1, Polarity::AboveOrEqual);
    // Only traces strictly inside the silhouette delineate finger cells;
    // the outline's own trace would fill back to the whole print.
    let inner_edges = mask_intersection(&edges, &interior).unwrap();

    let (labels, stats) = label_components(&inner_edges);
    let selected = select_components(&stats, cfg.min_perimeter);

    // Everything kept inside the line-eroded silhouette stays inside the
    // silhouette after a line closing, so the nullification below cannot
    // push a region across the outline's pixel-level bites.
    let safe = erode_via_complement(&solid, &line);

    let se3 = StructuringElement::square3();
    let mut cell_fills: Vec<BinaryMask> = Vec::new();
    for label in selected {
        let trace = labels.mask_of(label);
        let filled = fill_holes(&dilate(&trace, &se3));
        let clipped = mask_intersection(&filled, &safe).unwrap();
        if clipped.count() >= cfg.min_region_area {
            cell_fills.push(clipped);
        }
    }
    if cell_fills.len() < 2 {
        return Err(PipelineError::TooFewRegions {
            found: cell_fills.len(),
        });
    }

    // Nullify: each filled cell carries the bridging dilation's bite mark
    // on its overlap-facing side, so grow by the line and take the matching
    // erosion back. Closings are idempotent, which makes every emitted cell
    // stable under a further dilate-erode round.
    let mut cells: Vec<BinaryMask> = cell_fills.iter().map(|f| close_with(f, &line)).collect();
    // contested pixels (only possible across very thin walls) go to the
    // earlier cell
    for i in 0..cells.len() {
        for j in (i + 1)..cells.len() {
            let (head, tail) = cells.split_at_mut(j);
            if !mask_intersection(&head[i], &tail[0]).unwrap().is_empty() {
                tail[0] = mask_difference(&tail[0], &head[i]).unwrap();
            }
        }
    }

    // The overlap zone is the largest piece of interior left unclaimed by
    // the cells (smaller leftovers are slivers along the outline). Eroding
    // by the chosen line undoes the bridging dilation; erosions are stable
    // under dilate-erode rounds, and carving after the cells keeps the
    // regions disjoint by construction.
    let mut unclaimed = interior;
    for c in &cells {
        unclaimed = mask_difference(&unclaimed, c).unwrap();
    }
    let (zone_labels, zone_stats) = label_components(&unclaimed);
    let zone = zone_stats
        .iter()
        .max_by_key(|s| (s.area, std::cmp::Reverse(s.label)))
        .map(|s| zone_labels.mask_of(s.label))
        .unwrap_or(unclaimed);
    let overlap_region = erode_via_complement(&zone, &line);
    if overlap_region.count() < cfg.min_region_area {
        return Err(PipelineError::TooFewRegions { found: 1 });
    }

    let mut regions = vec![overlap_region];
    regions.extend(cells);

    Ok(SplitOutcome { regions, edges })
}

fn iou_of(a: &BinaryMask, b: &BinaryMask) -> f64 {
    let inter = mask_intersection(a, b).unwrap().count();
    let union = mask_union(a, b).unwrap().count();
    if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    }
}

/// Runs the whole pipeline. When `want_trace` is set, the returned trace
/// carries the intermediate stages keyed "b" through "k" ("k2", "k3" for
/// extra fingers).
pub fn run(
    img: &GrayImage,
    cfg: &PipelineConfig,
    want_trace: bool,
) -> Result<(RegionMaskSet, Option<StageTrace>), PipelineError> {
    cfg.validate()?;
    let mut trace = want_trace.then(StageTrace::default);

    let pre = preprocess(img, cfg)?;
    let (foreground, fg_threshold) = extract_foreground_mask(&pre.padded_input, cfg)?;
    // Only pixels inside the silhouette can be overlap; zeroing the rest
    // keeps the background ramp out of the automatic threshold.
    let masked = {
        let mut m = pre.intensified.clone();
        for (v, &keep) in m.data_mut().iter_mut().zip(foreground.data()) {
            if !keep {
                *v = 0;
            }
        }
        m
    };
    let (overlap_raw, overlap_threshold) = extract_overlap_mask(&masked, cfg)?;
    let overlap_seed = mask_intersection(&overlap_raw, &foreground).unwrap();
    if overlap_seed.is_empty() {
        return Err(PipelineError::NoOverlapFound);
    }
    let ring = boundary_ring(&foreground);

    if let Some(t) = trace.as_mut() {
        t.push("b", pre.blurred.clone());
        t.push("c", pre.intensified.clone());
        t.push("d", overlap_raw.to_gray());
        t.push("e", ring.to_gray());
        t.push("f", mask_union(&ring, &overlap_seed).unwrap().to_gray());
    }

    let bridge = bridge_gap(&overlap_seed, &foreground, cfg)?;
    // clip the dilation's overshoot so everything downstream stays inside
    // the silhouette
    let bridged = mask_intersection(&bridge.bridged, &foreground).unwrap();
    let split = split_regions(&bridged, bridge.angle_deg, bridge.line_len, cfg)?;

    if let Some(t) = trace.as_mut() {
        t.push("g", bridged.to_gray());
        t.push("h", split.edges.to_gray());
    }

    // Clip to the actual foreground and drop anything that got too small;
    // the region most like the pre-bridge overlap is the overlap.
    let mut masks: Vec<BinaryMask> = Vec::new();
    for r in &split.regions {
        let clipped = mask_intersection(r, &foreground).unwrap();
        if clipped.count() >= cfg.min_region_area {
            masks.push(clipped);
        }
    }
    if masks.len() < 3 {
        return Err(PipelineError::TooFewRegions {
            found: masks.len().saturating_sub(1),
        });
    }
    let overlap_idx = (0..masks.len())
        .max_by(|&i, &j| {
            iou_of(&masks[i], &overlap_seed)
                .partial_cmp(&iou_of(&masks[j], &overlap_seed))
                .unwrap()
        })
        .unwrap();
    let overlap = masks.remove(overlap_idx);
    let components = masks;

    if let Some(t) = trace.as_mut() {
        t.push("i", components[0].to_gray());
        t.push("j", overlap.to_gray());
        for (n, c) in components.iter().enumerate().skip(1) {
            let key = if n == 1 {
                "k".to_string()
            } else {
                format!("k{n}")
            };
            t.push(&key, c.to_gray());
        }
    }

    let set = RegionMaskSet {
        foreground,
        overlap,
        components,
        provenance: Provenance {
            gain: pre.gain,
            overlap_threshold,
            fg_threshold,
            angle_deg: bridge.angle_deg,
            line_len: bridge.line_len,
        },
    };
    Ok((set, trace))
}

/// Region colors: background white, overlap red, fingers from a fixed
/// palette that darkens by 40% each cycle.
pub fn component_color(index: usize) -> [u8; 3] {
    const BASE: [[u8; 3]; 3] = [[60, 90, 200], [60, 170, 90], [210, 190, 60]];
    let base = BASE[index % 3];
    let factor = 0.6f64.powi((index / 3) as i32);
    [
        (base[0] as f64 * factor).round() as u8,
        (base[1] as f64 * factor).round() as u8,
        (base[2] as f64 * factor).round() as u8,
    ]
}

pub const OVERLAP_COLOR: [u8; 3] = [220, 50, 50];

/// Paints the mask set into an RGB raster for visual comparison.
pub fn reconstruct(set: &RegionMaskSet) -> RgbImage {
    let (w, h) = (set.foreground.width(), set.foreground.height());
    let mut out = RgbImage::new(w, h, [255, 255, 255]);
    for (i, comp) in set.components.iter().enumerate() {
        let color = component_color(i);
        for y in 0..h {
            for x in 0..w {
                if comp.get(x, y) {
                    out.set(x, y, color);
                }
            }
        }
    }
    for y in 0..h {
        for x in 0..w {
            if set.overlap.get(x, y) {
                out.set(x, y, OVERLAP_COLOR);
            }
        }
    }
    out
}

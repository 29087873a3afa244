//! Binary mathematical morphology: structuring elements, dilation, erosion,
//! area opening, hole filling, and connected-component labeling with area
//! and perimeter statistics.
//!
//! Connectivity is 8 for foreground components and 4 for background floods,
//! the standard complementary pair. Erosion treats out-of-bounds as
//! background, so masks shrink at the canvas border.

use crate::image::{complement, BinaryMask};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorphError {
    #[error("structuring element length {0} must be odd and >= 1")]
    EvenLength(usize),
}

/// Set of (dy, dx) offsets with the anchor (0,0) always included.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuringElement {
    offsets: Vec<(i32, i32)>,
}

impl StructuringElement {
    /// The full 3x3 square: all offsets in {-1,0,1}².
    pub fn square3() -> Self {
        Self::rect(3, 3).unwrap()
    }

    /// Solid rectangle of odd side lengths centered on the anchor.
    pub fn rect(height: usize, width: usize) -> Result<Self, MorphError> {
        if height % 2 == 0 || height == 0 {
            return Err(MorphError::EvenLength(height));
        }
        if width % 2 == 0 || width == 0 {
            return Err(MorphError::EvenLength(width));
        }
        let (rh, rw) = ((height as i32 - 1) / 2, (width as i32 - 1) / 2);
        let mut offsets = Vec::with_capacity(height * width);
        for dy in -rh..=rh {
            for dx in -rw..=rw {
                offsets.push((dy, dx));
            }
        }
        Ok(StructuringElement { offsets })
    }

    /// Digital line segment through the anchor at `angle_deg`, holding
    /// exactly `length` pixels: the major axis steps -r..=r and the minor
    /// axis follows the rounded slope, which is how a rasterized segment of
    /// Chebyshev radius r = (length-1)/2 comes out.
    pub fn line(length: usize, angle_deg: f64) -> Result<Self, MorphError> {
        if length % 2 == 0 || length == 0 {
            return Err(MorphError::EvenLength(length));
        }
        let r = (length as i32 - 1) / 2;
        Ok(StructuringElement {
            offsets: (-r..=r).map(|t| line_offset(t, angle_deg)).collect(),
        })
    }

    /// Negates every offset. Lines and rectangles are symmetric, so
    /// reflect(se) == se for them.
    pub fn reflect(&self) -> Self {
        let mut offsets: Vec<(i32, i32)> =
            self.offsets.iter().map(|&(dy, dx)| (-dy, -dx)).collect();
        offsets.reverse();
        StructuringElement { offsets }
    }

    pub fn offsets(&self) -> &[(i32, i32)] {
        &self.offsets
    }

    pub fn contains(&self, offset: (i32, i32)) -> bool {
        self.offsets.contains(&offset)
    }

    /// Largest Chebyshev norm over the offsets.
    pub fn radius(&self) -> usize {
        self.offsets
            .iter()
            .map(|&(dy, dx)| dy.unsigned_abs().max(dx.unsigned_abs()) as usize)
            .max()
            .unwrap_or(0)
    }
}

/// Offset of the line pixel at signed major-axis step `t`. Offsets for a
/// given angle are nested: growing the length only appends steps with
/// larger |t|.
pub(crate) fn line_offset(t: i32, angle_deg: f64) -> (i32, i32) {
    let theta = angle_deg.rem_euclid(180.0).to_radians();
    let (s, c) = (theta.sin(), theta.cos());
    let round_away = |v: f64| -> i32 {
        if v >= 0.0 {
            (v + 0.5).floor() as i32
        } else {
            -((-v + 0.5).floor() as i32)
        }
    };
    if c.abs() >= s.abs() {
        // x is the major axis; slope = dy/dx
        let slope = s / c;
        let dx = if c >= 0.0 { t } else { -t };
        (round_away(dx as f64 * slope), dx)
    } else {
        let slope = c / s;
        (t, round_away(t as f64 * slope))
    }
}

/// out(p) = true iff some translate (p - o), o in se, hits foreground.
pub fn dilate(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width() as i32, m.height() as i32);
    let mut out = BinaryMask::new(m.width(), m.height(), false);
    let out_data = out.data_mut();
    for y in 0..h {
        for x in 0..w {
            if !m.get(x as usize, y as usize) {
                continue;
            }
            for &(dy, dx) in se.offsets() {
                let (qx, qy) = (x + dx, y + dy);
                if qx >= 0 && qy >= 0 && qx < w && qy < h {
                    out_data[(qy * w + qx) as usize] = true;
                }
            }
        }
    }
    out
}

/// out(p) = true iff every (p + o), o in se, is in bounds and foreground.
pub fn erode(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (m.width() as i32, m.height() as i32);
    BinaryMask::from_fn(m.width(), m.height(), |x, y| {
        if !m.get(x, y) {
            return false; // anchor is in se
        }
        se.offsets().iter().all(|&(dy, dx)| {
            let (qx, qy) = (x as i32 + dx, y as i32 + dy);
            qx >= 0 && qy >= 0 && qx < w && qy < h && m.get(qx as usize, qy as usize)
        })
    })
}

/// Erosion written the other way round: complement, dilate with the
/// reflected element, complement. Out-of-bounds counts as foreground here,
/// so the two views agree away from the canvas border.
pub fn erode_via_complement(m: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    complement(&dilate(&complement(m), &se.reflect()))
}

/// Label map plus per-component statistics.
#[derive(Debug, Clone)]
pub struct LabelMap {
    width: usize,
    height: usize,
    labels: Vec<u32>,
}

impl LabelMap {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u32 {
        self.labels[y * self.width + x]
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Mask of pixels carrying `label`.
    pub fn mask_of(&self, label: u32) -> BinaryMask {
        let mut m = BinaryMask::new(self.width, self.height, false);
        let data = m.data_mut();
        for (i, &l) in self.labels.iter().enumerate() {
            if l == label {
                data[i] = true;
            }
        }
        m
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentStats {
    /// Positive label; 1..=N in raster first-encounter order.
    pub label: u32,
    pub area: usize,
    /// Boundary-pixel count: labeled pixels with a background 4-neighbor or
    /// on the image border.
    pub perimeter: usize,
    /// (top, left, bottom, right), inclusive.
    pub bbox: (usize, usize, usize, usize),
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new() -> Self {
        UnionFind { parent: vec![0] } // slot 0 unused; labels start at 1
    }

    fn make(&mut self) -> u32 {
        let id = self.parent.len() as u32;
        self.parent.push(id);
        id
    }

    fn find(&mut self, mut i: u32) -> u32 {
        while self.parent[i as usize] != i {
            let gp = self.parent[self.parent[i as usize] as usize];
            self.parent[i as usize] = gp;
            i = gp;
        }
        i
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // smaller root wins, keeping raster order stable
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi as usize] = lo;
        }
    }
}

/// Two-pass union-find labeling, 8-connectivity, labels 1..=N assigned in
/// raster first-encounter order.
pub fn label_components(m: &BinaryMask) -> (LabelMap, Vec<ComponentStats>) {
    let (w, h) = (m.width(), m.height());
    let mut provisional = vec![0u32; w * h];
    let mut uf = UnionFind::new();

    for y in 0..h {
        for x in 0..w {
            if !m.get(x, y) {
                continue;
            }
            // earlier-scanned 8-neighbors: W, NW, N, NE
            let mut assigned = 0u32;
            let neighbors = [
                (x.wrapping_sub(1), y),
                (x.wrapping_sub(1), y.wrapping_sub(1)),
                (x, y.wrapping_sub(1)),
                (x + 1, y.wrapping_sub(1)),
            ];
            for &(nx, ny) in &neighbors {
                if nx < w && ny < h {
                    let nl = provisional[ny * w + nx];
                    if nl != 0 {
                        if assigned == 0 {
                            assigned = nl;
                        } else {
                            uf.union(assigned, nl);
                        }
                    }
                }
            }
            if assigned == 0 {
                assigned = uf.make();
            }
            provisional[y * w + x] = assigned;
        }
    }

    // compress to final labels in raster first-encounter order
    let mut remap = vec![0u32; uf.parent.len()];
    let mut labels = vec![0u32; w * h];
    let mut stats: Vec<ComponentStats> = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let p = provisional[y * w + x];
            if p == 0 {
                continue;
            }
            let root = uf.find(p);
            let final_label = if remap[root as usize] != 0 {
                remap[root as usize]
            } else {
                let l = stats.len() as u32 + 1;
                remap[root as usize] = l;
                stats.push(ComponentStats {
                    label: l,
                    area: 0,
                    perimeter: 0,
                    bbox: (y, x, y, x),
                });
                l
            };
            labels[y * w + x] = final_label;
            let s = &mut stats[(final_label - 1) as usize];
            s.area += 1;
            let (top, left, bottom, right) = s.bbox;
            s.bbox = (top.min(y), left.min(x), bottom.max(y), right.max(x));
            let on_border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
            let has_bg_4neighbor = (x > 0 && !m.get(x - 1, y))
                || (x + 1 < w && !m.get(x + 1, y))
                || (y > 0 && !m.get(x, y - 1))
                || (y + 1 < h && !m.get(x, y + 1));
            if on_border || has_bg_4neighbor {
                s.perimeter += 1;
            }
        }
    }

    (
        LabelMap {
            width: w,
            height: h,
            labels,
        },
        stats,
    )
}

/// Labels whose perimeter reaches `min_perimeter`, in label order.
pub fn select_components(stats: &[ComponentStats], min_perimeter: usize) -> Vec<u32> {
    stats
        .iter()
        .filter(|s| s.perimeter >= min_perimeter)
        .map(|s| s.label)
        .collect()
}

/// Removes every 8-connected component with area below `min_area`.
pub fn area_open(m: &BinaryMask, min_area: usize) -> BinaryMask {
    if min_area == 0 {
        return m.clone();
    }
    let (labels, stats) = label_components(m);
    let keep: Vec<bool> = std::iter::once(false)
        .chain(stats.iter().map(|s| s.area >= min_area))
        .collect();
    let mut out = BinaryMask::new(m.width(), m.height(), false);
    let data = out.data_mut();
    for (i, &l) in labels.labels().iter().enumerate() {
        data[i] = keep[l as usize];
    }
    out
}

/// Background regions not 4-connected to the image border become foreground.
pub fn fill_holes(m: &BinaryMask) -> BinaryMask {
    let (w, h) = (m.width(), m.height());
    let mut reached = vec![false; w * h];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    let push = |x: usize, y: usize, reached: &mut Vec<bool>, stack: &mut Vec<(usize, usize)>| {
        if !m.get(x, y) && !reached[y * w + x] {
            reached[y * w + x] = true;
            stack.push((x, y));
        }
    };
    for x in 0..w {
        push(x, 0, &mut reached, &mut stack);
        push(x, h - 1, &mut reached, &mut stack);
    }
    for y in 0..h {
        push(0, y, &mut reached, &mut stack);
        push(w - 1, y, &mut reached, &mut stack);
    }
    while let Some((x, y)) = stack.pop() {
        if x > 0 {
            push(x - 1, y, &mut reached, &mut stack);
        }
        if x + 1 < w {
            push(x + 1, y, &mut reached, &mut stack);
        }
        if y > 0 {
            push(x, y - 1, &mut reached, &mut stack);
        }
        if y + 1 < h {
            push(x, y + 1, &mut reached, &mut stack);
        }
    }
    let mut out = BinaryMask::new(w, h, false);
    let data = out.data_mut();
    for (i, &r) in reached.iter().enumerate() {
        data[i] = !r;
    }
    out
}

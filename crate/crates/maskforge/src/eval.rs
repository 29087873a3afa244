//! Quantitative evaluation of pipeline output against fixture ground truth,
//! with wall-clock timing and a JSON report. Pipeline failures are data in
//! the report, never process failures.

use crate::image::{mask_intersection, mask_union, BinaryMask, ImageError};
use crate::pipeline::{self, PipelineConfig};
use crate::synth::OverlapFixture;
use serde::{Deserialize, Serialize};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

/// Intersection over union; 1.0 when both masks are empty.
pub fn iou(a: &BinaryMask, b: &BinaryMask) -> Result<f64, ImageError> {
    let inter = mask_intersection(a, b)?.count();
    let union = mask_union(a, b)?.count();
    Ok(if union == 0 {
        1.0
    } else {
        inter as f64 / union as f64
    })
}

/// One entry of a component assignment; unmatched sides carry None.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMatch {
    pub pred: Option<usize>,
    pub truth: Option<usize>,
    pub iou: f64,
}

/// Exhaustive assignment between predicted and ground-truth components
/// maximizing summed IoU. List sizes stay tiny (two or three fingers), so
/// brute force over injections is exact.
pub fn match_components(pred: &[BinaryMask], truth: &[BinaryMask]) -> Vec<ComponentMatch> {
    debug_assert!(pred.len() <= 4 && truth.len() <= 4);
    let mut table = vec![vec![0.0f64; truth.len()]; pred.len()];
    for (i, p) in pred.iter().enumerate() {
        for (j, t) in truth.iter().enumerate() {
            table[i][j] = iou(p, t).unwrap_or(0.0);
        }
    }

    // recursively try every truth index (or none) for each pred
    fn search(
        table: &[Vec<f64>],
        pred_idx: usize,
        used: &mut Vec<bool>,
        current: &mut Vec<Option<usize>>,
        best: &mut (f64, Vec<Option<usize>>),
    ) {
        if pred_idx == table.len() {
            let total: f64 = current
                .iter()
                .enumerate()
                .filter_map(|(i, j)| j.map(|j| table[i][j]))
                .sum();
            if total > best.0 {
                *best = (total, current.clone());
            }
            return;
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                current.push(Some(j));
                search(table, pred_idx + 1, used, current, best);
                current.pop();
                used[j] = false;
            }
        }
        current.push(None);
        search(table, pred_idx + 1, used, current, best);
        current.pop();
    }

    let mut best = (-1.0, vec![None; pred.len()]);
    let mut used = vec![false; truth.len()];
    search(&table, 0, &mut used, &mut Vec::new(), &mut best);

    let assignment = best.1;
    let mut out: Vec<ComponentMatch> = assignment
        .iter()
        .enumerate()
        .map(|(i, &j)| ComponentMatch {
            pred: Some(i),
            truth: j,
            iou: j.map_or(0.0, |j| table[i][j]),
        })
        .collect();
    for j in 0..truth.len() {
        if !assignment.contains(&Some(j)) {
            out.push(ComponentMatch {
                pred: None,
                truth: Some(j),
                iou: 0.0,
            });
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixtureReport {
    pub name: String,
    /// "ok" or the pipeline error name.
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub overlap_iou: Option<f64>,
    /// IoU per ground-truth component under the best assignment; unmatched
    /// truths score 0.
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub component_ious: Vec<f64>,
    /// |union of predicted regions| / |ground-truth foreground|.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub coverage: Option<f64>,
    pub runtime_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub ok_count: usize,
    pub error_count: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_overlap_iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_overlap_iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_component_iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_component_iou: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub min_coverage: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub mean_runtime_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub median_runtime_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub schema: u32,
    pub fixtures: Vec<FixtureReport>,
    pub aggregate: Aggregate,
}

/// Runs the pipeline on one fixture, timing only the run itself. Pipeline
/// errors land in `status`.
pub fn evaluate(name: &str, fixture: &OverlapFixture, cfg: &PipelineConfig) -> FixtureReport {
    let start = Instant::now();
    let outcome = pipeline::run(&fixture.image, cfg, false);
    let runtime_ms = start.elapsed().as_millis() as u64;

    match outcome {
        Err(e) => FixtureReport {
            name: name.to_string(),
            status: e.name().to_string(),
            overlap_iou: None,
            component_ious: Vec::new(),
            coverage: None,
            runtime_ms,
        },
        Ok((set, _)) => {
            // ground truth lives in unpadded coordinates; pad it to match
            let p = cfg.pad;
            let grow = |m: &BinaryMask| -> BinaryMask {
                let (w, h) = (m.width() + 2 * p, m.height() + 2 * p);
                BinaryMask::from_fn(w, h, |x, y| {
                    x >= p && y >= p && x - p < m.width() && y - p < m.height()
                        && m.get(x - p, y - p)
                })
            };
            let gt_overlap = grow(&fixture.gt_overlap);
            let gt_components: Vec<BinaryMask> =
                fixture.gt_components.iter().map(&grow).collect();
            let gt_foreground = grow(&fixture.gt_foreground);

            let overlap_iou = iou(&set.overlap, &gt_overlap).ok();
            // the matcher brute-forces assignments, so cap the prediction
            // list at the four largest regions
            let mut pred: Vec<&BinaryMask> = set.components.iter().collect();
            if pred.len() > 4 {
                pred.sort_by_key(|m| std::cmp::Reverse(m.count()));
                pred.truncate(4);
            }
            let pred: Vec<BinaryMask> = pred.into_iter().cloned().collect();
            let matches = match_components(&pred, &gt_components);
            let mut component_ious = vec![0.0; gt_components.len()];
            for m in &matches {
                if let Some(j) = m.truth {
                    component_ious[j] = m.iou;
                }
            }
            let mut predicted = set.overlap.clone();
            for c in &set.components {
                predicted = mask_union(&predicted, c).unwrap();
            }
            let coverage = match gt_foreground.count() {
                0 => None,
                n => Some(
                    mask_intersection(&predicted, &gt_foreground).unwrap().count() as f64
                        / n as f64,
                ),
            };
            FixtureReport {
                name: name.to_string(),
                status: "ok".to_string(),
                overlap_iou,
                component_ious,
                coverage,
                runtime_ms,
            }
        }
    }
}

fn aggregate(fixtures: &[FixtureReport]) -> Aggregate {
    let ok: Vec<&FixtureReport> = fixtures.iter().filter(|f| f.status == "ok").collect();
    let ok_count = ok.len();
    let error_count = fixtures.len() - ok_count;

    let stats = |values: Vec<f64>| -> (Option<f64>, Option<f64>) {
        if values.is_empty() {
            (None, None)
        } else {
            let mean = values.iter().sum::<f64>() / values.len() as f64;
            let min = values.iter().copied().fold(f64::INFINITY, f64::min);
            (Some(mean), Some(min))
        }
    };
    let (mean_overlap_iou, min_overlap_iou) =
        stats(ok.iter().filter_map(|f| f.overlap_iou).collect());
    let (mean_component_iou, min_component_iou) = stats(
        ok.iter()
            .flat_map(|f| f.component_ious.iter().copied())
            .collect(),
    );
    let (mean_coverage, min_coverage) = stats(ok.iter().filter_map(|f| f.coverage).collect());

    let mut runtimes: Vec<u64> = ok.iter().map(|f| f.runtime_ms).collect();
    runtimes.sort_unstable();
    let (mean_runtime_ms, median_runtime_ms) = if runtimes.is_empty() {
        (None, None)
    } else {
        let mean = runtimes.iter().sum::<u64>() as f64 / runtimes.len() as f64;
        let mid = runtimes.len() / 2;
        let median = if runtimes.len() % 2 == 1 {
            runtimes[mid] as f64
        } else {
            (runtimes[mid - 1] + runtimes[mid]) as f64 / 2.0
        };
        (Some(mean), Some(median))
    };

    Aggregate {
        ok_count,
        error_count,
        mean_overlap_iou,
        min_overlap_iou,
        mean_component_iou,
        min_component_iou,
        mean_coverage,
        min_coverage,
        mean_runtime_ms,
        median_runtime_ms,
    }
}

/// Evaluates fixtures, optionally across threads; the report keeps input
/// order regardless of completion order.
pub fn evaluate_all(
    fixtures: &[(String, OverlapFixture)],
    cfg: &PipelineConfig,
    jobs: usize,
) -> EvalReport {
    let jobs = jobs.max(1).min(fixtures.len().max(1));
    let mut reports: Vec<Option<FixtureReport>> = vec![None; fixtures.len()];
    if jobs <= 1 {
        for (slot, (name, fx)) in reports.iter_mut().zip(fixtures) {
            *slot = Some(evaluate(name, fx, cfg));
        }
    } else {
        let next = AtomicUsize::new(0);
        let results = Mutex::new(&mut reports);
        std::thread::scope(|scope| {
            for _ in 0..jobs {
                scope.spawn(|| loop {
                    let i = next.fetch_add(1, Ordering::Relaxed);
                    if i >= fixtures.len() {
                        break;
                    }
                    let (name, fx) = &fixtures[i];
                    let report = evaluate(name, fx, cfg);
                    results.lock().unwrap()[i] = Some(report);
                });
            }
        });
    }
    let fixtures: Vec<FixtureReport> = reports.into_iter().map(|r| r.unwrap()).collect();
    let aggregate = aggregate(&fixtures);
    EvalReport {
        schema: 1,
        fixtures,
        aggregate,
    }
}

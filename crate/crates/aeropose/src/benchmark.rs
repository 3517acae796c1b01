//! Trajectory benchmarking: synchronization, reference interpolation,
//! error statistics, cumulative-frequency curves, rotated-box IoU and
//! average precision.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::LtpPoint;
use crate::shape::RotatedBox;

/// Frame-to-UTC synchronization: frame 0 occurs at `t0` (the PPS/LED event)
/// and frames advance at `fps`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SyncConfig {
    pub fps: f64,
    pub t0_utc_s: f64,
}

impl SyncConfig {
    pub fn new(fps: f64, t0_utc_s: f64) -> Result<Self> {
        if !(fps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fps must be positive, got {fps}"
            )));
        }
        if !t0_utc_s.is_finite() {
            return Err(Error::InvalidParameter("t0 must be finite".into()));
        }
        Ok(Self { fps, t0_utc_s })
    }

    /// Worst-case synchronization slack, half the frame period.
    pub fn worst_case_slack_s(&self) -> f64 {
        1.0 / (2.0 * self.fps)
    }
}

/// One sample of the reference trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceSample {
    pub t_utc_s: f64,
    pub pos: LtpPoint,
}

/// Position error statistics reported as percentile rows in px plus mean in m.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorStats {
    pub median_px: f64,
    pub mean_px: f64,
    pub p90_px: f64,
    pub p99_px: f64,
    pub p999_px: f64,
    pub mean_m: f64,
    pub n: usize,
}

/// Per-frame position error in both units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub frame_id: u64,
    pub error_m: f64,
    pub error_px: f64,
}

/// Result of comparing estimated positions against the reference.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionErrors {
    pub records: Vec<ErrorRecord>,
    /// Frames dropped because detection/registration failed or the
    /// timestamp fell outside the reference span.
    pub n_excluded: usize,
}

pub fn frame_timestamp(frame_idx: u64, sync: &SyncConfig) -> f64 {
    sync.t0_utc_s + frame_idx as f64 / sync.fps
}

/// Linear interpolation of the reference series; refuses extrapolation.
/// The series must be strictly increasing in time.
pub fn interpolate_reference(series: &[ReferenceSample], t: f64) -> Result<LtpPoint> {
    if series.is_empty() {
        return Err(Error::EmptyInput("reference series".into()));
    }
    let first = series[0].t_utc_s;
    let last = series[series.len() - 1].t_utc_s;
    if t < first || t > last {
        return Err(Error::OutOfRange {
            value: t,
            min: first,
            max: last,
        });
    }
    let idx = series.partition_point(|s| s.t_utc_s <= t);
    if idx == 0 {
        return Ok(series[0].pos);
    }
    if idx == series.len() {
        return Ok(series[series.len() - 1].pos);
    }
    let a = &series[idx - 1];
    let b = &series[idx];
    if a.t_utc_s == t {
        return Ok(a.pos);
    }
    let w = (t - a.t_utc_s) / (b.t_utc_s - a.t_utc_s);
    Ok(LtpPoint::new(
        a.pos.x + w * (b.pos.x - a.pos.x),
        a.pos.y + w * (b.pos.y - a.pos.y),
    ))
}

fn sorted_reference(series: &[ReferenceSample]) -> Result<Vec<ReferenceSample>> {
    let mut sorted = series.to_vec();
    sorted.sort_by(|a, b| a.t_utc_s.partial_cmp(&b.t_utc_s).unwrap());
    for w in sorted.windows(2) {
        if w[0].t_utc_s >= w[1].t_utc_s {
            return Err(Error::InvalidParameter(
                "reference timestamps must be strictly increasing".into(),
            ));
        }
    }
    Ok(sorted)
}

/// Frame-by-frame error between estimated positions and the interpolated
/// reference. `estimates` carries `None` for frames where detection or
/// registration failed; those are excluded and counted.
pub fn position_errors(
    estimates: &[(u64, Option<LtpPoint>)],
    reference: &[ReferenceSample],
    sync: &SyncConfig,
    gsd: f64,
) -> Result<PositionErrors> {
    if !(gsd > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gsd must be positive, got {gsd}"
        )));
    }
    let reference = sorted_reference(reference)?;
    let mut records = Vec::new();
    let mut n_excluded = 0usize;
    for (frame_id, est) in estimates {
        let Some(est) = est else {
            n_excluded += 1;
            continue;
        };
        let t = frame_timestamp(*frame_id, sync);
        match interpolate_reference(&reference, t) {
            Ok(refpos) => {
                let error_m = est.distance(&refpos);
                records.push(ErrorRecord {
                    frame_id: *frame_id,
                    error_m,
                    error_px: error_m / gsd,
                });
            }
            Err(Error::OutOfRange { .. }) => n_excluded += 1,
            Err(e) => return Err(e),
        }
    }
    if records.is_empty() {
        return Err(Error::EmptyInput(
            "no frame overlaps the reference trajectory".into(),
        ));
    }
    Ok(PositionErrors {
        records,
        n_excluded,
    })
}

/// Nearest-rank percentile on a pre-sorted ascending sample.
fn nearest_rank(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let rank = (q * n as f64).ceil() as usize;
    sorted[rank.clamp(1, n) - 1]
}

/// Median / mean / tail percentiles of the error sample. Percentiles use the
/// nearest-rank convention, means are arithmetic.
pub fn error_statistics(records: &[ErrorRecord]) -> Result<ErrorStats> {
    if records.is_empty() {
        return Err(Error::EmptyInput("error records".into()));
    }
    let mut px: Vec<f64> = records.iter().map(|r| r.error_px).collect();
    px.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = records.len();
    Ok(ErrorStats {
        median_px: nearest_rank(&px, 0.5),
        mean_px: px.iter().sum::<f64>() / n as f64,
        p90_px: nearest_rank(&px, 0.9),
        p99_px: nearest_rank(&px, 0.99),
        p999_px: nearest_rank(&px, 0.999),
        mean_m: records.iter().map(|r| r.error_m).sum::<f64>() / n as f64,
        n,
    })
}

/// Cumulative frequency curve: fraction of errors at or below each bin upper
/// edge. Ends at 1.0 whenever `max_px` covers the largest error.
pub fn cumulative_frequency(
    errors_px: &[f64],
    max_px: f64,
    n_bins: usize,
) -> Result<Vec<(f64, f64)>> {
    if errors_px.is_empty() {
        return Err(Error::EmptyInput("error sample".into()));
    }
    if n_bins < 1 || !(max_px > 0.0) {
        return Err(Error::InvalidParameter(
            "need n_bins >= 1 and max_px > 0".into(),
        ));
    }
    let n = errors_px.len() as f64;
    let mut curve = Vec::with_capacity(n_bins);
    for k in 1..=n_bins {
        let upper = max_px * k as f64 / n_bins as f64;
        let count = errors_px.iter().filter(|&&e| e <= upper).count();
        curve.push((upper, count as f64 / n));
    }
    Ok(curve)
}

fn polygon_area(poly: &[(f64, f64)]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut a = 0.0;
    for i in 0..n {
        let (x1, y1) = poly[i];
        let (x2, y2) = poly[(i + 1) % n];
        a += x1 * y2 - x2 * y1;
    }
    a / 2.0
}

/// Sutherland-Hodgman clip of a convex subject polygon against a convex
/// clip polygon (both counter-clockwise).
fn clip_convex(subject: &[(f64, f64)], clip: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut output = subject.to_vec();
    for i in 0..clip.len() {
        if output.is_empty() {
            break;
        }
        let a = clip[i];
        let b = clip[(i + 1) % clip.len()];
        let input = std::mem::take(&mut output);
        let inside = |p: (f64, f64)| (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0;
        let intersect = |p: (f64, f64), q: (f64, f64)| {
            let d1 = (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0);
            let d2 = (b.0 - a.0) * (q.1 - a.1) - (b.1 - a.1) * (q.0 - a.0);
            let t = d1 / (d1 - d2);
            (p.0 + t * (q.0 - p.0), p.1 + t * (q.1 - p.1))
        };
        for j in 0..input.len() {
            let cur = input[j];
            let next = input[(j + 1) % input.len()];
            if inside(cur) {
                output.push(cur);
                if !inside(next) {
                    output.push(intersect(cur, next));
                }
            } else if inside(next) {
                output.push(intersect(cur, next));
            }
        }
    }
    output
}

fn ccw_perimeter(b: &RotatedBox) -> Vec<(f64, f64)> {
    let p = b.perimeter();
    let mut poly: Vec<(f64, f64)> = p.iter().map(|q| (q.x, q.y)).collect();
    if polygon_area(&poly) < 0.0 {
        poly.reverse();
    }
    poly
}

/// Intersection-over-union of two rotated boxes via convex polygon clipping.
pub fn rotated_iou(a: &RotatedBox, b: &RotatedBox) -> Result<f64> {
    let (area_a, area_b) = (a.area(), b.area());
    if area_a == 0.0 || area_b == 0.0 {
        return Err(Error::Degenerate("zero-area box".into()));
    }
    let pa = ccw_perimeter(a);
    let pb = ccw_perimeter(b);
    let inter = polygon_area(&clip_convex(&pa, &pb)).abs();
    let union = area_a + area_b - inter;
    Ok((inter / union).clamp(0.0, 1.0))
}

/// A scored detection for AP evaluation.
#[derive(Debug, Clone)]
pub struct EvalDetection {
    pub frame_id: u64,
    pub confidence: f64,
    pub rbox: RotatedBox,
}

/// A ground-truth box for AP evaluation.
#[derive(Debug, Clone)]
pub struct EvalGroundTruth {
    pub frame_id: u64,
    pub rbox: RotatedBox,
}

/// Average precision at one IoU threshold: confidence-sorted greedy matching
/// within each frame, then the area under the interpolated precision-recall
/// curve. Empty detections with non-empty truth give 0.
pub fn average_precision(
    detections: &[EvalDetection],
    ground_truth: &[EvalGroundTruth],
    iou_threshold: f64,
) -> Result<f64> {
    if !(iou_threshold > 0.0 && iou_threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "IoU threshold must be in (0, 1), got {iou_threshold}"
        )));
    }
    if ground_truth.is_empty() {
        return Ok(if detections.is_empty() { 1.0 } else { 0.0 });
    }
    if detections.is_empty() {
        return Ok(0.0);
    }
    let mut order: Vec<usize> = (0..detections.len()).collect();
    order.sort_by(|&i, &j| {
        detections[j]
            .confidence
            .partial_cmp(&detections[i].confidence)
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut gt_used = vec![false; ground_truth.len()];
    let mut tp = Vec::with_capacity(detections.len());
    for &di in &order {
        let det = &detections[di];
        let mut best: Option<(usize, f64)> = None;
        for (gi, gt) in ground_truth.iter().enumerate() {
            if gt_used[gi] || gt.frame_id != det.frame_id {
                continue;
            }
            let iou = rotated_iou(&det.rbox, &gt.rbox)?;
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        match best {
            Some((gi, _)) => {
                gt_used[gi] = true;
                tp.push(true);
            }
            None => tp.push(false),
        }
    }
    // Precision-recall with the interpolated (monotone envelope) precision.
    let n_gt = ground_truth.len() as f64;
    let mut cum_tp = 0usize;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(tp.len());
    for (k, &is_tp) in tp.iter().enumerate() {
        if is_tp {
            cum_tp += 1;
        }
        let precision = cum_tp as f64 / (k + 1) as f64;
        let recall = cum_tp as f64 / n_gt;
        points.push((recall, precision));
    }
    let mut ap = 0.0;
    let mut prev_recall = 0.0;
    for i in 0..points.len() {
        let (r, _) = points[i];
        if r > prev_recall {
            let p_interp = points[i..].iter().map(|&(_, p)| p).fold(0.0, f64::max);
            ap += (r - prev_recall) * p_interp;
            prev_recall = r;
        }
    }
    Ok(ap)
}

/// COCO-style mean AP over IoU thresholds 0.50 to 0.95 in steps of 0.05.
pub fn coco_average_precision(
    detections: &[EvalDetection],
    ground_truth: &[EvalGroundTruth],
) -> Result<f64> {
    let mut sum = 0.0;
    let mut count = 0usize;
    for k in 0..10 {
        let thr = 0.5 + 0.05 * k as f64;
        sum += average_precision(detections, ground_truth, thr)?;
        count += 1;
    }
    Ok(sum / count as f64)
}

//! Detection shapes, convex hulls, minimum-area rotated boxes and the
//! semantic corner ordering used downstream.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{map_pixel_to_ltp, FrameGeoreference, LtpPoint, PcfPoint};

/// Relative tolerance for the rectangle checks (side lengths, orthogonality).
pub const RECT_TOLERANCE: f64 = 1e-6;

/// Boundary polygon (or mask outline) of one detection in the pixel frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionShape {
    pub frame_id: u64,
    pub points: Vec<PcfPoint>,
    pub confidence: Option<f64>,
}

/// Known metric vehicle dimensions, width <= length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VehicleDims {
    pub width: f64,
    pub length: f64,
}

impl VehicleDims {
    pub fn new(width: f64, length: f64) -> Result<Self> {
        if !(width > 0.0) || !(length >= width) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < width <= length, got width {width}, length {length}"
            )));
        }
        Ok(Self { width, length })
    }
}

/// Four corners of a rotated box in the pixel frame.
///
/// Non-canonical boxes store the corners in perimeter order. Canonical boxes
/// store them semantically: b1 nearest the principal point, b2 across the
/// shorter side, b3 across the longer side, b4 diagonal, so that
/// `|b2-b1| <= |b3-b1| <= |b4-b1|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotatedBox {
    corners: [PcfPoint; 4],
    canonical: bool,
}

impl RotatedBox {
    /// Build from corners in perimeter order, validating the rectangle.
    pub fn from_perimeter(corners: [PcfPoint; 4]) -> Result<Self> {
        let b = Self {
            corners,
            canonical: false,
        };
        b.check_rectangle()?;
        Ok(b)
    }

    /// Build without validation. Used for corrected boxes whose corners were
    /// shifted individually and are only approximately rectangular.
    pub fn from_corners_unchecked(corners: [PcfPoint; 4], canonical: bool) -> Self {
        Self { corners, canonical }
    }

    pub fn corners(&self) -> &[PcfPoint; 4] {
        &self.corners
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Corners in perimeter order regardless of storage convention.
    pub fn perimeter(&self) -> [PcfPoint; 4] {
        let c = self.corners;
        if self.canonical {
            [c[0], c[1], c[3], c[2]]
        } else {
            c
        }
    }

    pub fn area(&self) -> f64 {
        let p = self.perimeter();
        let mut a = 0.0;
        for i in 0..4 {
            let q = p[(i + 1) % 4];
            a += p[i].x * q.y - q.x * p[i].y;
        }
        a.abs() / 2.0
    }

    fn check_rectangle(&self) -> Result<()> {
        let p = self.perimeter();
        let sides: Vec<(f64, f64)> = (0..4)
            .map(|i| {
                let q = p[(i + 1) % 4];
                (q.x - p[i].x, q.y - p[i].y)
            })
            .collect();
        let len = |s: &(f64, f64)| s.0.hypot(s.1);
        let scale = sides.iter().map(len).fold(0.0, f64::max);
        if scale == 0.0 {
            return Err(Error::Degenerate("zero-size box".into()));
        }
        for i in 0..2 {
            if (len(&sides[i]) - len(&sides[i + 2])).abs() > RECT_TOLERANCE * scale {
                return Err(Error::Degenerate("opposite sides differ in length".into()));
            }
        }
        for i in 0..4 {
            let a = &sides[i];
            let b = &sides[(i + 1) % 4];
            let dot = a.0 * b.0 + a.1 * b.1;
            if dot.abs() > RECT_TOLERANCE * scale * scale {
                return Err(Error::Degenerate(
                    "adjacent sides are not perpendicular".into(),
                ));
            }
        }
        Ok(())
    }
}

fn cross(o: &PcfPoint, a: &PcfPoint, b: &PcfPoint) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

/// Counter-clockwise convex hull (monotone chain). Collinear input collapses
/// to the two extreme points.
pub fn convex_hull(points: &[PcfPoint]) -> Result<Vec<PcfPoint>> {
    if points.is_empty() {
        return Err(Error::EmptyInput("convex hull of no points".into()));
    }
    let mut pts: Vec<PcfPoint> = points.to_vec();
    pts.sort_by(|a, b| {
        a.x.partial_cmp(&b.x)
            .unwrap()
            .then(a.y.partial_cmp(&b.y).unwrap())
    });
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() <= 2 {
        return Ok(pts);
    }
    let mut lower: Vec<PcfPoint> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0.0
        {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<PcfPoint> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0.0
        {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    // Everything collinear collapses to the two extreme points.
    if lower.len() < 3 {
        return Ok(vec![pts[0], *pts.last().unwrap()]);
    }
    Ok(lower)
}

/// Minimum-area enclosing rectangle via rotating calipers over the hull:
/// one side of the optimum is collinear with a hull edge.
pub fn min_area_rect(points: &[PcfPoint]) -> Result<RotatedBox> {
    let hull = convex_hull(points)?;
    if hull.len() < 3 {
        return Err(Error::Degenerate(
            "points are collinear, no enclosing rectangle".into(),
        ));
    }
    let mut best: Option<(f64, [PcfPoint; 4])> = None;
    for i in 0..hull.len() {
        let a = hull[i];
        let b = hull[(i + 1) % hull.len()];
        let (ex, ey) = (b.x - a.x, b.y - a.y);
        let norm = ex.hypot(ey);
        if norm == 0.0 {
            continue;
        }
        let (ux, uy) = (ex / norm, ey / norm);
        let (nx, ny) = (-uy, ux);
        let (mut umin, mut umax, mut vmin, mut vmax) = (
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        );
        for p in &hull {
            let u = p.x * ux + p.y * uy;
            let v = p.x * nx + p.y * ny;
            umin = umin.min(u);
            umax = umax.max(u);
            vmin = vmin.min(v);
            vmax = vmax.max(v);
        }
        let area = (umax - umin) * (vmax - vmin);
        if best.as_ref().is_none_or(|(a, _)| area < *a) {
            let corner = |u: f64, v: f64| PcfPoint::new(u * ux + v * nx, u * uy + v * ny);
            best = Some((
                area,
                [
                    corner(umin, vmin),
                    corner(umax, vmin),
                    corner(umax, vmax),
                    corner(umin, vmax),
                ],
            ));
        }
    }
    let (_, corners) = best.ok_or_else(|| Error::Degenerate("degenerate hull".into()))?;
    Ok(RotatedBox {
        corners,
        canonical: false,
    })
}

/// Reorder corners semantically: b1 is the corner nearest the principal
/// point, b2 the adjacent corner across the shorter side, b3 across the
/// longer side, b4 the diagonal. Ties break toward the smaller polar angle
/// about b1. Idempotent.
pub fn canonicalize_corners(rbox: &RotatedBox, geo: &FrameGeoreference) -> RotatedBox {
    let c = rbox.corners;
    let o = geo.principal_point();
    let angle_about = |p: &PcfPoint, q: &PcfPoint| (q.y - p.y).atan2(q.x - p.x);

    let b1_idx = (0..4)
        .min_by(|&i, &j| {
            let (di, dj) = (c[i].distance(&o), c[j].distance(&o));
            di.partial_cmp(&dj).unwrap().then_with(|| {
                angle_about(&o, &c[i])
                    .partial_cmp(&angle_about(&o, &c[j]))
                    .unwrap()
            })
        })
        .unwrap();
    let b1 = c[b1_idx];
    let mut rest: Vec<PcfPoint> = (0..4).filter(|&i| i != b1_idx).map(|i| c[i]).collect();
    // Diagonal corner is the farthest from b1.
    rest.sort_by(|a, b| {
        let (da, db) = (b1.distance(a), b1.distance(b));
        da.partial_cmp(&db).unwrap().then_with(|| {
            angle_about(&b1, a)
                .partial_cmp(&angle_about(&b1, b))
                .unwrap()
        })
    });
    let (b2, b3, b4) = (rest[0], rest[1], rest[2]);
    RotatedBox {
        corners: [b1, b2, b3, b4],
        canonical: true,
    }
}

/// Geometric center of the mapped box: per-axis (max + min) / 2.
pub fn box_center(corners: &[LtpPoint; 4]) -> LtpPoint {
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in corners {
        xmin = xmin.min(p.x);
        xmax = xmax.max(p.x);
        ymin = ymin.min(p.y);
        ymax = ymax.max(p.y);
    }
    LtpPoint::new((xmax + xmin) / 2.0, (ymax + ymin) / 2.0)
}

/// Estimated metric width and length of a canonical box.
pub fn estimated_dims(rbox: &RotatedBox, gsd: f64) -> Result<VehicleDims> {
    if !rbox.canonical {
        return Err(Error::NonCanonicalBox);
    }
    if !(gsd > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "gsd must be positive, got {gsd}"
        )));
    }
    let c = rbox.corners;
    let w = gsd * c[0].distance(&c[1]);
    let l = gsd * c[0].distance(&c[2]);
    Ok(VehicleDims {
        width: w,
        length: l,
    })
}

/// Map all four corners onto the LTP, preserving corner order.
pub fn map_box_to_ltp(rbox: &RotatedBox, geo: &FrameGeoreference) -> [LtpPoint; 4] {
    let c = rbox.corners;
    [
        map_pixel_to_ltp(&c[0], geo),
        map_pixel_to_ltp(&c[1], geo),
        map_pixel_to_ltp(&c[2], geo),
        map_pixel_to_ltp(&c[3], geo),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn p(x: f64, y: f64) -> PcfPoint {
        PcfPoint::new(x, y)
    }

    fn geo_identity() -> FrameGeoreference {
        FrameGeoreference::new(1.0, 0.0, [0.0, 0.0], (1920, 1080)).unwrap()
    }

    fn point_in_convex(poly: &[PcfPoint], q: &PcfPoint, slack: f64) -> bool {
        // CCW polygon: point is inside iff it is left of every edge.
        (0..poly.len()).all(|i| {
            let a = poly[i];
            let b = poly[(i + 1) % poly.len()];
            cross(&a, &b, q) >= -slack
        })
    }

    #[test]
    fn hull_of_triangle_is_itself() {
        let pts = vec![p(0.0, 0.0), p(4.0, 0.0), p(2.0, 3.0)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 3);
    }

    #[test]
    fn hull_drops_interior_point() {
        let pts = vec![
            p(0.0, 0.0),
            p(1.0, 0.0),
            p(1.0, 1.0),
            p(0.0, 1.0),
            p(0.5, 0.5),
        ];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 4);
    }

    #[test]
    fn hull_collinear_collapses_to_extremes() {
        let pts = vec![p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0), p(3.0, 3.0)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.len(), 2);
        assert_eq!(hull[0], p(0.0, 0.0));
        assert_eq!(hull[1], p(3.0, 3.0));
    }

    #[test]
    fn hull_contains_every_input_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts: Vec<PcfPoint> = (0..1000)
            .map(|_| p(rng.gen_range(-50.0..50.0), rng.gen_range(-50.0..50.0)))
            .collect();
        let hull = convex_hull(&pts).unwrap();
        for q in &pts {
            assert!(point_in_convex(&hull, q, 1e-9));
        }
    }

    #[test]
    fn min_rect_of_axis_aligned_square() {
        let pts = vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0), p(0.0, 1.0)];
        let r = min_area_rect(&pts).unwrap();
        assert_abs_diff_eq!(r.area(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn min_rect_recovers_rotated_square() {
        let th: f64 = 30.0_f64.to_radians();
        let rot = |x: f64, y: f64| p(x * th.cos() - y * th.sin(), x * th.sin() + y * th.cos());
        let pts = vec![rot(0.0, 0.0), rot(1.0, 0.0), rot(1.0, 1.0), rot(0.0, 1.0)];
        let r = min_area_rect(&pts).unwrap();
        assert_abs_diff_eq!(r.area(), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn min_rect_rejects_collinear_input() {
        let pts = vec![p(0.0, 0.0), p(1.0, 1.0), p(2.0, 2.0)];
        assert!(min_area_rect(&pts).is_err());
    }

    #[test]
    fn min_rect_never_beats_angle_sweep_and_contains_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.gen_range(3..200);
            let pts: Vec<PcfPoint> = (0..n)
                .map(|_| p(rng.gen_range(-30.0..30.0), rng.gen_range(-20.0..20.0)))
                .collect();
            let r = match min_area_rect(&pts) {
                Ok(r) => r,
                Err(_) => continue,
            };
            // Brute-force sweep over 3600 angles.
            let mut sweep = f64::INFINITY;
            for k in 0..3600 {
                let th = k as f64 * std::f64::consts::PI / 3600.0;
                let (c, s) = (th.cos(), th.sin());
                let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
                let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
                for q in &pts {
                    let x = c * q.x + s * q.y;
                    let y = -s * q.x + c * q.y;
                    xmin = xmin.min(x);
                    xmax = xmax.max(x);
                    ymin = ymin.min(y);
                    ymax = ymax.max(y);
                }
                sweep = sweep.min((xmax - xmin) * (ymax - ymin));
            }
            assert!(
                r.area() <= sweep * (1.0 + 1e-6),
                "area {} sweep {}",
                r.area(),
                sweep
            );
            let perim = r.perimeter();
            for q in &pts {
                assert!(
                    point_in_convex(&perim, q, 1e-9 * (1.0 + r.area()))
                        || point_in_convex(
                            &[perim[3], perim[2], perim[1], perim[0]],
                            q,
                            1e-9 * (1.0 + r.area())
                        )
                );
            }
        }
    }

    #[test]
    fn min_rect_area_at_most_axis_aligned_bbox() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let pts: Vec<PcfPoint> = (0..40)
                .map(|_| p(rng.gen_range(0.0..100.0), rng.gen_range(0.0..100.0)))
                .collect();
            let r = min_area_rect(&pts).unwrap();
            let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
            let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
            for q in &pts {
                xmin = xmin.min(q.x);
                xmax = xmax.max(q.x);
                ymin = ymin.min(q.y);
                ymax = ymax.max(q.y);
            }
            assert!(r.area() <= (xmax - xmin) * (ymax - ymin) + 1e-9);
        }
    }

    #[test]
    fn min_rect_rotation_equivariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let pts: Vec<PcfPoint> = (0..60)
            .map(|_| p(rng.gen_range(0.0..40.0), rng.gen_range(0.0..25.0)))
            .collect();
        let base = min_area_rect(&pts).unwrap().area();
        for _ in 0..20 {
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (th.cos(), th.sin());
            let rotated: Vec<PcfPoint> = pts
                .iter()
                .map(|q| p(c * q.x - s * q.y, s * q.x + c * q.y))
                .collect();
            let area = min_area_rect(&rotated).unwrap().area();
            assert!((area - base).abs() <= 1e-6 * base);
        }
    }

    #[test]
    fn canonical_nearest_corner_becomes_b1() {
        let geo = geo_identity();
        // Principal point is (960, 540); corner (900, 500) is nearest.
        let r = RotatedBox::from_perimeter([
            p(900.0, 500.0),
            p(1000.0, 500.0),
            p(1000.0, 540.0),
            p(900.0, 540.0),
        ])
        .unwrap();
        let c = canonicalize_corners(&r, &geo);
        assert_eq!(c.corners()[0], p(1000.0, 540.0));
        // Shorter side (40 px) leads to b2, longer (100 px) to b3.
        assert_eq!(c.corners()[1], p(1000.0, 500.0));
        assert_eq!(c.corners()[2], p(900.0, 540.0));
        assert!(c.is_canonical());
    }

    #[test]
    fn canonical_square_tie_break_is_stable() {
        let geo = geo_identity();
        let r = RotatedBox::from_perimeter([
            p(100.0, 100.0),
            p(140.0, 100.0),
            p(140.0, 140.0),
            p(100.0, 140.0),
        ])
        .unwrap();
        let a = canonicalize_corners(&r, &geo);
        let b = canonicalize_corners(&a, &geo);
        assert_eq!(a, b);
        let c = a.corners();
        let d12 = c[0].distance(&c[1]);
        let d13 = c[0].distance(&c[2]);
        let d14 = c[0].distance(&c[3]);
        assert!(d12 <= d13 && d13 <= d14);
    }

    #[test]
    fn canonical_ordering_holds_on_random_rectangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let geo = geo_identity();
        for _ in 0..1000 {
            let cx = rng.gen_range(0.0..1920.0);
            let cy = rng.gen_range(0.0..1080.0);
            let w = rng.gen_range(5.0..80.0);
            let l = rng.gen_range(5.0..200.0);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (th.cos(), th.sin());
            let corner = |dx: f64, dy: f64| p(cx + c * dx - s * dy, cy + s * dx + c * dy);
            let r = RotatedBox::from_perimeter([
                corner(-l / 2.0, -w / 2.0),
                corner(l / 2.0, -w / 2.0),
                corner(l / 2.0, w / 2.0),
                corner(-l / 2.0, w / 2.0),
            ])
            .unwrap();
            let canon = canonicalize_corners(&r, &geo);
            let cc = canon.corners();
            // Brute-force over all 4x2 corner labelings: the canonical pick
            // must realize the minimum-distance ordering.
            let d12 = cc[0].distance(&cc[1]);
            let d13 = cc[0].distance(&cc[2]);
            let d14 = cc[0].distance(&cc[3]);
            assert!(d12 <= d13 + 1e-9 && d13 <= d14 + 1e-9);
            let o = geo.principal_point();
            for q in r.corners() {
                assert!(cc[0].distance(&o) <= q.distance(&o) + 1e-9);
            }
        }
    }

    #[test]
    fn center_of_unit_square() {
        let c = box_center(&[
            LtpPoint::new(0.0, 0.0),
            LtpPoint::new(1.0, 0.0),
            LtpPoint::new(1.0, 1.0),
            LtpPoint::new(0.0, 1.0),
        ]);
        assert_abs_diff_eq!(c.x, 0.5);
        assert_abs_diff_eq!(c.y, 0.5);
    }

    #[test]
    fn center_equals_corner_mean_for_rectangles() {
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..100 {
            let cx = rng.gen_range(-50.0..50.0);
            let cy = rng.gen_range(-50.0..50.0);
            let th = rng.gen_range(0.0..std::f64::consts::TAU);
            let (c, s) = (th.cos(), th.sin());
            let corner =
                |dx: f64, dy: f64| LtpPoint::new(cx + c * dx - s * dy, cy + s * dx + c * dy);
            let corners = [
                corner(-2.0, -1.0),
                corner(2.0, -1.0),
                corner(2.0, 1.0),
                corner(-2.0, 1.0),
            ];
            let eq6 = box_center(&corners);
            let mean = LtpPoint::new(
                corners.iter().map(|p| p.x).sum::<f64>() / 4.0,
                corners.iter().map(|p| p.y).sum::<f64>() / 4.0,
            );
            assert!(eq6.distance(&mean) < 1e-9);
        }
    }

    #[test]
    fn center_of_rotated_rectangle_at_offset() {
        let th = std::f64::consts::FRAC_PI_4;
        let (c, s) = (th.cos(), th.sin());
        let corner =
            |dx: f64, dy: f64| LtpPoint::new(10.0 + c * dx - s * dy, -3.0 + s * dx + c * dy);
        let eq6 = box_center(&[
            corner(-2.0, -1.0),
            corner(2.0, -1.0),
            corner(2.0, 1.0),
            corner(-2.0, 1.0),
        ]);
        assert_abs_diff_eq!(eq6.x, 10.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eq6.y, -3.0, epsilon = 1e-12);
    }

    #[test]
    fn estimated_dims_direct_products() {
        let geo = geo_identity();
        let r =
            RotatedBox::from_perimeter([p(0.0, 0.0), p(100.0, 0.0), p(100.0, 40.0), p(0.0, 40.0)])
                .unwrap();
        let canon = canonicalize_corners(&r, &geo);
        let dims = estimated_dims(&canon, 0.05).unwrap();
        assert_abs_diff_eq!(dims.width, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(dims.length, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn estimated_dims_square_and_noncanonical() {
        let geo = geo_identity();
        let r =
            RotatedBox::from_perimeter([p(0.0, 0.0), p(10.0, 0.0), p(10.0, 10.0), p(0.0, 10.0)])
                .unwrap();
        assert!(matches!(
            estimated_dims(&r, 1.0),
            Err(Error::NonCanonicalBox)
        ));
        let canon = canonicalize_corners(&r, &geo);
        let dims = estimated_dims(&canon, 1.0).unwrap();
        assert_abs_diff_eq!(dims.width, dims.length, epsilon = 1e-12);
    }

    #[test]
    fn mapped_box_preserves_rectangle() {
        let mut rng = ChaCha8Rng::seed_from_u64(44);
        for _ in 0..100 {
            let geo = FrameGeoreference::new(
                rng.gen_range(0.01..0.2),
                rng.gen_range(-3.0..3.0),
                [rng.gen_range(-20.0..20.0), rng.gen_range(-20.0..20.0)],
                (1920, 1080),
            )
            .unwrap();
            let r = RotatedBox::from_perimeter([
                p(100.0, 100.0),
                p(180.0, 100.0),
                p(180.0, 130.0),
                p(100.0, 130.0),
            ])
            .unwrap();
            let mapped = map_box_to_ltp(&r, &geo);
            // Mapped sides: equal opposite lengths, perpendicular adjacents.
            let side = |a: &LtpPoint, b: &LtpPoint| (b.x - a.x, b.y - a.y);
            let s0 = side(&mapped[0], &mapped[1]);
            let s1 = side(&mapped[1], &mapped[2]);
            let s2 = side(&mapped[2], &mapped[3]);
            let len = |s: (f64, f64)| s.0.hypot(s.1);
            assert!((len(s0) - len(s2)).abs() < 1e-6 * len(s0));
            assert!((s0.0 * s1.0 + s0.1 * s1.1).abs() < 1e-6 * len(s0) * len(s1));
            // Pure scaling doubles side lengths when gsd doubles.
        }
    }

    #[test]
    fn mapped_box_scales_side_lengths() {
        let geo = FrameGeoreference::new(2.0, 0.0, [0.0, 0.0], (1920, 1080)).unwrap();
        let r = RotatedBox::from_perimeter([p(0.0, 0.0), p(10.0, 0.0), p(10.0, 4.0), p(0.0, 4.0)])
            .unwrap();
        let mapped = map_box_to_ltp(&r, &geo);
        assert_abs_diff_eq!(mapped[0].distance(&mapped[1]), 20.0, epsilon = 1e-12);
    }
}

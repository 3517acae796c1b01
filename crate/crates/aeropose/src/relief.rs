//! Relief displacement correction.
//!
//! Elevated points in a vertical photograph appear displaced radially
//! outwards from the principal point; the displacement of a point at radial
//! pixel distance r and height h is d = r * h / H. Corners are corrected by
//! shifting them back toward the principal point, either with known vehicle
//! dimensions or with per-corner height approximations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{map_pixel_to_ltp, FrameGeoreference, LtpPoint, PcfPoint};
use crate::shape::{box_center, estimated_dims, map_box_to_ltp, RotatedBox, VehicleDims};

/// Geometry shared by all relief computations for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReliefContext {
    pub altitude_m: f64,
    pub resolution: (u32, u32),
    pub gsd: f64,
}

impl ReliefContext {
    pub fn new(altitude_m: f64, resolution: (u32, u32), gsd: f64) -> Result<Self> {
        if !(altitude_m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "altitude must be positive, got {altitude_m}"
            )));
        }
        if !(gsd > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gsd must be positive, got {gsd}"
            )));
        }
        Ok(Self {
            altitude_m,
            resolution,
            gsd,
        })
    }
}

/// Heights above the ground plane assigned to the canonical corners b1..b4.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CornerHeights {
    pub heights: [f64; 4],
}

/// Ground clearance approximation for passenger cars, meters.
pub const DEFAULT_GROUND_CLEARANCE_M: f64 = 0.15;
/// Body shoulder height approximation for passenger cars, meters.
pub const DEFAULT_SHOULDER_HEIGHT_M: f64 = 0.75;

impl CornerHeights {
    pub fn new(heights: [f64; 4], ctx: &ReliefContext) -> Result<Self> {
        for h in heights {
            if !(h >= 0.0) || h >= ctx.altitude_m {
                return Err(Error::OutOfRange {
                    value: h,
                    min: 0.0,
                    max: ctx.altitude_m,
                });
            }
        }
        Ok(Self { heights })
    }

    /// Default assignment: the corners spanning the estimated length that
    /// include b1 (b1 and b3) take the ground clearance, the remaining two
    /// (b2 and b4) the shoulder height.
    pub fn approx_defaults(
        ground_clearance: f64,
        shoulder: f64,
        ctx: &ReliefContext,
    ) -> Result<Self> {
        Self::new(
            [ground_clearance, shoulder, ground_clearance, shoulder],
            ctx,
        )
    }
}

/// Pixel coordinates relative to the image center.
pub fn image_centered_coords(p: &PcfPoint, resolution: (u32, u32)) -> [f64; 2] {
    [
        p.x - resolution.0 as f64 / 2.0,
        p.y - resolution.1 as f64 / 2.0,
    ]
}

/// Shift one corner back toward the principal point for an assumed height.
pub fn corner_shift(b: &PcfPoint, h: f64, ctx: &ReliefContext) -> Result<PcfPoint> {
    if !(h >= 0.0) || h >= ctx.altitude_m {
        return Err(Error::OutOfRange {
            value: h,
            min: 0.0,
            max: ctx.altitude_m,
        });
    }
    let img = image_centered_coords(b, ctx.resolution);
    Ok(PcfPoint::new(
        b.x - img[0] * h / ctx.altitude_m,
        b.y - img[1] * h / ctx.altitude_m,
    ))
}

/// A corrected box with its center in both frames.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectedBox {
    pub box_pcf: RotatedBox,
    pub center_pcf: PcfPoint,
    pub center_ltp: LtpPoint,
}

/// Known-dimensions correction: the near corner b1 is height-shifted by the
/// ground clearance, then the detected width/length corner offsets are
/// rescaled to the true metric dimensions and re-anchored at the shifted b1.
/// The corrected center is the midpoint of the two rescaled corners.
pub fn correct_box_known_dims(
    rbox: &RotatedBox,
    dims: &VehicleDims,
    ground_clearance: f64,
    ctx: &ReliefContext,
    geo: &FrameGeoreference,
) -> Result<CorrectedBox> {
    if !rbox.is_canonical() {
        return Err(Error::NonCanonicalBox);
    }
    let est = estimated_dims(rbox, ctx.gsd)?;
    if !(est.width > 0.0) || !(est.length > 0.0) {
        return Err(Error::Degenerate("estimated dimensions are zero".into()));
    }
    let c = rbox.corners();
    let b1 = c[0];
    let b1_shift = corner_shift(&b1, ground_clearance, ctx)?;
    let rw = dims.width / est.width;
    let rl = dims.length / est.length;
    // Direction and length come from the detected corner offsets; the true
    // metric dimensions fix their magnitude, the shifted b1 anchors them.
    let bw = PcfPoint::new(
        b1_shift.x + rw * (c[1].x - b1.x),
        b1_shift.y + rw * (c[1].y - b1.y),
    );
    let bl = PcfPoint::new(
        b1_shift.x + rl * (c[2].x - b1.x),
        b1_shift.y + rl * (c[2].y - b1.y),
    );
    let center_pcf = PcfPoint::new((bw.x + bl.x) / 2.0, (bw.y + bl.y) / 2.0);
    let b4 = PcfPoint::new(bw.x + bl.x - b1_shift.x, bw.y + bl.y - b1_shift.y);
    Ok(CorrectedBox {
        box_pcf: RotatedBox::from_corners_unchecked([b1_shift, bw, bl, b4], true),
        center_pcf,
        center_ltp: map_pixel_to_ltp(&center_pcf, geo),
    })
}

/// Approximate-heights correction: every canonical corner is shifted by its
/// assigned height and the center is recomputed from the shifted corners.
pub fn correct_box_approx(
    rbox: &RotatedBox,
    heights: &CornerHeights,
    ctx: &ReliefContext,
    geo: &FrameGeoreference,
) -> Result<CorrectedBox> {
    if !rbox.is_canonical() {
        return Err(Error::NonCanonicalBox);
    }
    let c = rbox.corners();
    let mut shifted = [PcfPoint::new(0.0, 0.0); 4];
    for i in 0..4 {
        shifted[i] = corner_shift(&c[i], heights.heights[i], ctx)?;
    }
    let out = RotatedBox::from_corners_unchecked(shifted, true);
    let mapped = map_box_to_ltp(&out, geo);
    let center_ltp = box_center(&mapped);
    let center_pcf = {
        // Pixel-frame center from the same per-axis extents rule.
        let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &shifted {
            xmin = xmin.min(p.x);
            xmax = xmax.max(p.x);
            ymin = ymin.min(p.y);
            ymax = ymax.max(p.y);
        }
        PcfPoint::new((xmax + xmin) / 2.0, (ymax + ymin) / 2.0)
    };
    Ok(CorrectedBox {
        box_pcf: out,
        center_pcf,
        center_ltp,
    })
}

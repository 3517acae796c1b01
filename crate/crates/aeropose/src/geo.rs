//! Coordinate frames and ground-control-point georeferencing.
//!
//! Two frames are used throughout: the local tangent plane (LTP, meters,
//! x east / y north) and the pixel coordinate frame (PCF, pixels, origin in
//! the image corner). A [`FrameGeoreference`] maps between them through a
//! scaled rotation plus offset.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Point on the local tangent plane, meters east (x) and north (y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LtpPoint {
    pub x: f64,
    pub y: f64,
}

impl LtpPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &LtpPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Point in the pixel coordinate frame. Negative coordinates are allowed
/// (registration can push points outside the image).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcfPoint {
    pub x: f64,
    pub y: f64,
}

impl PcfPoint {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &PcfPoint) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Marker with known coordinates in both frames.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundControlPoint {
    pub id: String,
    pub ltp: LtpPoint,
    pub pcf: PcfPoint,
}

/// Wrap an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let mut a = a.rem_euclid(TAU);
    if a > PI {
        a -= TAU;
    }
    a
}

/// Mapping between PCF and LTP for one (registered) frame: ground sampling
/// distance `gsd` (m/px), orientation offset `delta` (rad, in (-pi, pi]),
/// linear offset `offset` (m) and the image resolution in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameGeoreference {
    pub gsd: f64,
    pub delta: f64,
    pub offset: [f64; 2],
    pub resolution: (u32, u32),
}

impl FrameGeoreference {
    pub fn new(gsd: f64, delta: f64, offset: [f64; 2], resolution: (u32, u32)) -> Result<Self> {
        if !(gsd > 0.0) || !gsd.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "gsd must be positive, got {gsd}"
            )));
        }
        if resolution.0 == 0 || resolution.1 == 0 {
            return Err(Error::InvalidParameter(
                "resolution must be positive".into(),
            ));
        }
        if !offset[0].is_finite() || !offset[1].is_finite() || !delta.is_finite() {
            return Err(Error::InvalidParameter(
                "non-finite georeference parameter".into(),
            ));
        }
        Ok(Self {
            gsd,
            delta: normalize_angle(delta),
            offset,
            resolution,
        })
    }

    /// Principal point, taken as the image center.
    pub fn principal_point(&self) -> PcfPoint {
        PcfPoint::new(
            self.resolution.0 as f64 / 2.0,
            self.resolution.1 as f64 / 2.0,
        )
    }
}

/// Camera flight parameters. The focal length is optional because the
/// operative GSD is normally derived from GCPs rather than optics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FlightConfig {
    pub altitude_m: f64,
    pub focal_length_m: Option<f64>,
    pub fps: f64,
}

impl FlightConfig {
    pub fn new(altitude_m: f64, focal_length_m: Option<f64>, fps: f64) -> Result<Self> {
        if !(altitude_m > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "altitude must be positive, got {altitude_m}"
            )));
        }
        if let Some(f) = focal_length_m {
            if !(f > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "focal length must be positive, got {f}"
                )));
            }
        }
        if !(fps > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "fps must be positive, got {fps}"
            )));
        }
        Ok(Self {
            altitude_m,
            focal_length_m,
            fps,
        })
    }
}

/// Dimensionless photographic scale f/H of a vertical photograph.
pub fn photo_scale(cfg: &FlightConfig) -> Result<f64> {
    let f = cfg
        .focal_length_m
        .ok_or_else(|| Error::InvalidParameter("focal length not configured".into()))?;
    if !(cfg.altitude_m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "altitude must be positive, got {}",
            cfg.altitude_m
        )));
    }
    Ok(f / cfg.altitude_m)
}

/// GSD from one GCP pair: metric distance over pixel distance.
pub fn gsd_from_gcp_pair(a: &GroundControlPoint, b: &GroundControlPoint) -> Result<f64> {
    let px = a.pcf.distance(&b.pcf);
    if px == 0.0 {
        return Err(Error::Degenerate(format!(
            "GCPs {} and {} coincide in the pixel frame",
            a.id, b.id
        )));
    }
    Ok(a.ltp.distance(&b.ltp) / px)
}

/// Orientation offset between the scaled pixel frame and the LTP, from one
/// GCP pair. Result is normalized to (-pi, pi].
pub fn orientation_offset(a: &GroundControlPoint, b: &GroundControlPoint, gsd: f64) -> Result<f64> {
    if a.pcf.distance(&b.pcf) == 0.0 || a.ltp.distance(&b.ltp) == 0.0 {
        return Err(Error::Degenerate(format!(
            "GCP pair {}/{} is degenerate",
            a.id, b.id
        )));
    }
    let theta_p = (gsd * (b.pcf.y - a.pcf.y)).atan2(gsd * (b.pcf.x - a.pcf.x));
    let theta_l = (b.ltp.y - a.ltp.y).atan2(b.ltp.x - a.ltp.x);
    Ok(normalize_angle(theta_p - theta_l))
}

/// Linear offset from one GCP: R(delta)^T (g_pcf * S) - g_ltp.
pub fn linear_offset(g: &GroundControlPoint, gsd: f64, delta: f64) -> [f64; 2] {
    let (sx, sy) = (g.pcf.x * gsd, g.pcf.y * gsd);
    let (c, s) = (delta.cos(), delta.sin());
    [c * sx + s * sy - g.ltp.x, -s * sx + c * sy - g.ltp.y]
}

/// Map a pixel onto the LTP: p_L = R(delta)^T (p * S) - Delta.
pub fn map_pixel_to_ltp(p: &PcfPoint, geo: &FrameGeoreference) -> LtpPoint {
    let (sx, sy) = (p.x * geo.gsd, p.y * geo.gsd);
    let (c, s) = (geo.delta.cos(), geo.delta.sin());
    LtpPoint::new(
        c * sx + s * sy - geo.offset[0],
        -s * sx + c * sy - geo.offset[1],
    )
}

/// Exact inverse of [`map_pixel_to_ltp`].
pub fn map_ltp_to_pixel(p: &LtpPoint, geo: &FrameGeoreference) -> PcfPoint {
    let vx = p.x + geo.offset[0];
    let vy = p.y + geo.offset[1];
    let (c, s) = (geo.delta.cos(), geo.delta.sin());
    PcfPoint::new((c * vx - s * vy) / geo.gsd, (s * vx + c * vy) / geo.gsd)
}

/// Closed-form least-squares fit of (gsd, delta, offset) over a set of GCPs,
/// minimizing the LTP residual of the pixel-to-LTP mapping. With exactly two
/// GCPs the fit interpolates and reduces to the pairwise construction.
pub fn estimate_georeference(
    gcps: &[GroundControlPoint],
    resolution: (u32, u32),
) -> Result<FrameGeoreference> {
    if gcps.len() < 2 {
        return Err(Error::TooFewSamples {
            got: gcps.len(),
            need: 2,
        });
    }
    for i in 0..gcps.len() {
        for j in (i + 1)..gcps.len() {
            if gcps[i].id == gcps[j].id {
                return Err(Error::InvalidParameter(format!(
                    "duplicate GCP id {}",
                    gcps[i].id
                )));
            }
            if gcps[i].pcf == gcps[j].pcf || gcps[i].ltp == gcps[j].ltp {
                return Err(Error::Degenerate(format!(
                    "GCPs {} and {} coincide",
                    gcps[i].id, gcps[j].id
                )));
            }
        }
    }

    // Fit p_L = s R(theta) p_P + t in closed form, then delta = -theta,
    // Delta = -t. Centered complex regression.
    let n = gcps.len() as f64;
    let (mut px_c, mut py_c, mut lx_c, mut ly_c) = (0.0, 0.0, 0.0, 0.0);
    for g in gcps {
        px_c += g.pcf.x;
        py_c += g.pcf.y;
        lx_c += g.ltp.x;
        ly_c += g.ltp.y;
    }
    px_c /= n;
    py_c /= n;
    lx_c /= n;
    ly_c /= n;

    let (mut a, mut b, mut d) = (0.0, 0.0, 0.0);
    for g in gcps {
        let (ux, uy) = (g.pcf.x - px_c, g.pcf.y - py_c);
        let (vx, vy) = (g.ltp.x - lx_c, g.ltp.y - ly_c);
        a += ux * vx + uy * vy;
        b += ux * vy - uy * vx;
        d += ux * ux + uy * uy;
    }
    if d == 0.0 {
        return Err(Error::Degenerate(
            "all GCPs coincide in the pixel frame".into(),
        ));
    }
    let scale = a.hypot(b) / d;
    if !(scale > 0.0) {
        return Err(Error::Degenerate("all GCPs coincide on the LTP".into()));
    }
    let theta = b.atan2(a);
    let delta = normalize_angle(-theta);
    // t = q_bar - s R(theta) p_bar; Delta = -t.
    let (c, s) = (theta.cos(), theta.sin());
    let tx = lx_c - scale * (c * px_c - s * py_c);
    let ty = ly_c - scale * (s * px_c + c * py_c);

    FrameGeoreference::new(scale, delta, [-tx, -ty], resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn gcp(id: &str, lx: f64, ly: f64, px: f64, py: f64) -> GroundControlPoint {
        GroundControlPoint {
            id: id.into(),
            ltp: LtpPoint::new(lx, ly),
            pcf: PcfPoint::new(px, py),
        }
    }

    #[test]
    fn photo_scale_is_focal_over_altitude() {
        let cfg = FlightConfig::new(100.0, Some(0.0088), 50.0).unwrap();
        assert_abs_diff_eq!(photo_scale(&cfg).unwrap(), 8.8e-5, epsilon = 1e-18);
    }

    #[test]
    fn photo_scale_halves_when_altitude_doubles() {
        let lo = FlightConfig::new(57.0, Some(0.0088), 50.0).unwrap();
        let hi = FlightConfig::new(114.0, Some(0.0088), 50.0).unwrap();
        assert_eq!(photo_scale(&lo).unwrap(), 2.0 * photo_scale(&hi).unwrap());
    }

    #[test]
    fn photo_scale_rejects_missing_focal_and_zero_altitude() {
        let cfg = FlightConfig::new(100.0, None, 50.0).unwrap();
        assert!(photo_scale(&cfg).is_err());
        assert!(FlightConfig::new(0.0, Some(0.01), 50.0).is_err());
    }

    #[test]
    fn gsd_from_pair_is_direct_ratio() {
        let a = gcp("a", 0.0, 0.0, 0.0, 0.0);
        let b = gcp("b", 10.0, 0.0, 200.0, 0.0);
        assert_abs_diff_eq!(gsd_from_gcp_pair(&a, &b).unwrap(), 0.05, epsilon = 1e-15);
    }

    #[test]
    fn gsd_from_pair_rejects_coincident_pixels() {
        let a = gcp("a", 0.0, 0.0, 5.0, 5.0);
        let b = gcp("b", 10.0, 0.0, 5.0, 5.0);
        assert!(matches!(
            gsd_from_gcp_pair(&a, &b),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn orientation_offset_aligned_frames_is_zero() {
        let a = gcp("a", 0.0, 0.0, 0.0, 0.0);
        let b = gcp("b", 5.0, 0.0, 100.0, 0.0);
        assert_abs_diff_eq!(orientation_offset(&a, &b, 0.05).unwrap(), 0.0);
    }

    #[test]
    fn orientation_offset_quarter_turn() {
        // PCF pair along +y_P, LTP pair along +x_L: atan2 terms pi/2 and 0.
        let a = gcp("a", 0.0, 0.0, 0.0, 0.0);
        let b = gcp("b", 5.0, 0.0, 0.0, 100.0);
        assert_abs_diff_eq!(
            orientation_offset(&a, &b, 0.05).unwrap(),
            FRAC_PI_2,
            epsilon = 1e-15
        );
    }

    #[test]
    fn orientation_offset_wraps_into_range() {
        // Directions chosen so the raw difference exceeds pi.
        let a = gcp("a", 0.0, 0.0, 0.0, 0.0);
        let b = gcp("b", 1.0, -0.01, -1.0, -0.01);
        let d = orientation_offset(&a, &b, 1.0).unwrap();
        assert!(d > -PI && d <= PI);
    }

    #[test]
    fn linear_offset_identity_rotation() {
        let g = gcp("g", 2.0, 3.0, 5.0, 5.0);
        let d = linear_offset(&g, 1.0, 0.0);
        assert_abs_diff_eq!(d[0], 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 2.0, epsilon = 1e-15);
    }

    #[test]
    fn linear_offset_zero_pixel_is_negated_ltp() {
        let g = gcp("g", 4.0, -7.0, 0.0, 0.0);
        let d = linear_offset(&g, 0.05, 0.3);
        assert_abs_diff_eq!(d[0], -4.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], 7.0, epsilon = 1e-15);
    }

    #[test]
    fn linear_offset_quarter_turn() {
        let g = gcp("g", 0.0, 0.0, 1.0, 0.0);
        let d = linear_offset(&g, 1.0, FRAC_PI_2);
        assert_abs_diff_eq!(d[0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(d[1], -1.0, epsilon = 1e-15);
    }

    #[test]
    fn map_pixel_identity_and_quarter_turn() {
        let geo = FrameGeoreference::new(1.0, 0.0, [0.0, 0.0], (1920, 1080)).unwrap();
        let p = map_pixel_to_ltp(&PcfPoint::new(3.0, 4.0), &geo);
        assert_abs_diff_eq!(p.x, 3.0);
        assert_abs_diff_eq!(p.y, 4.0);

        let geo = FrameGeoreference::new(1.0, FRAC_PI_2, [0.0, 0.0], (1920, 1080)).unwrap();
        let p = map_pixel_to_ltp(&PcfPoint::new(1.0, 0.0), &geo);
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, -1.0, epsilon = 1e-15);
    }

    #[test]
    fn map_ltp_to_pixel_pure_scaling() {
        let geo = FrameGeoreference::new(2.0, 0.0, [0.0, 0.0], (1920, 1080)).unwrap();
        let p = map_ltp_to_pixel(&LtpPoint::new(4.0, 4.0), &geo);
        assert_abs_diff_eq!(p.x, 2.0);
        assert_abs_diff_eq!(p.y, 2.0);
    }

    #[test]
    fn two_exact_gcps_are_interpolated() {
        let truth = FrameGeoreference::new(0.069, 0.21, [12.0, -5.0], (1920, 1080)).unwrap();
        let mk = |id: &str, px: f64, py: f64| {
            let p = PcfPoint::new(px, py);
            GroundControlPoint {
                id: id.into(),
                ltp: map_pixel_to_ltp(&p, &truth),
                pcf: p,
            }
        };
        let gcps = vec![mk("a", 100.0, 200.0), mk("b", 1700.0, 900.0)];
        let est = estimate_georeference(&gcps, (1920, 1080)).unwrap();
        for g in &gcps {
            let m = map_pixel_to_ltp(&g.pcf, &est);
            assert!(m.distance(&g.ltp) < 1e-9, "residual {}", m.distance(&g.ltp));
        }
        // Pairwise construction is reproduced exactly.
        let s_pair = gsd_from_gcp_pair(&gcps[0], &gcps[1]).unwrap();
        assert_abs_diff_eq!(est.gsd, s_pair, epsilon = 1e-12);
        let d_pair = orientation_offset(&gcps[0], &gcps[1], s_pair).unwrap();
        assert_abs_diff_eq!(est.delta, d_pair, epsilon = 1e-12);
    }

    #[test]
    fn four_noiseless_gcps_recover_parameters() {
        let truth = FrameGeoreference::new(0.05, -0.4, [3.0, 8.0], (1920, 1080)).unwrap();
        let gcps: Vec<_> = [
            (50.0, 60.0),
            (1800.0, 120.0),
            (900.0, 1000.0),
            (200.0, 950.0),
        ]
        .iter()
        .enumerate()
        .map(|(i, &(px, py))| {
            let p = PcfPoint::new(px, py);
            GroundControlPoint {
                id: format!("g{i}"),
                ltp: map_pixel_to_ltp(&p, &truth),
                pcf: p,
            }
        })
        .collect();
        let est = estimate_georeference(&gcps, (1920, 1080)).unwrap();
        assert!((est.gsd - truth.gsd).abs() < 1e-9);
        assert!((est.delta - truth.delta).abs() < 1e-9);
        assert!((est.offset[0] - truth.offset[0]).abs() < 1e-9);
        assert!((est.offset[1] - truth.offset[1]).abs() < 1e-9);
    }

    #[test]
    fn estimate_rejects_too_few_or_coincident() {
        let g = gcp("a", 0.0, 0.0, 0.0, 0.0);
        assert!(matches!(
            estimate_georeference(std::slice::from_ref(&g), (100, 100)),
            Err(Error::TooFewSamples { .. })
        ));
        let h = gcp("b", 1.0, 1.0, 0.0, 0.0);
        assert!(estimate_georeference(&[g, h], (100, 100)).is_err());
    }

    #[test]
    fn quantized_gcps_residual_stays_bounded() {
        // Monte-Carlo over 1000 seeds: +-1 px quantization on 4 GCPs at
        // S=0.05 keeps the fit residual RMS below 0.08 m.
        use rand::{Rng, SeedableRng};
        let truth = FrameGeoreference::new(0.05, 0.1, [5.0, -2.0], (1920, 1080)).unwrap();
        for seed in 0..1000u64 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let gcps: Vec<_> = (0..4)
                .map(|i| {
                    let p = PcfPoint::new(
                        rng.gen_range(100.0..1820.0_f64),
                        rng.gen_range(100.0..980.0_f64),
                    );
                    let ltp = map_pixel_to_ltp(&p, &truth);
                    GroundControlPoint {
                        id: format!("g{i}"),
                        ltp,
                        pcf: PcfPoint::new(p.x.round(), p.y.round()),
                    }
                })
                .collect();
            let est = match estimate_georeference(&gcps, (1920, 1080)) {
                Ok(e) => e,
                Err(_) => continue, // coincident after rounding, vanishingly rare
            };
            let rms = (gcps
                .iter()
                .map(|g| {
                    let m = map_pixel_to_ltp(&g.pcf, &est);
                    m.distance(&g.ltp).powi(2)
                })
                .sum::<f64>()
                / 4.0)
                .sqrt();
            assert!(rms <= 0.08, "seed {seed}: residual RMS {rms}");
        }
    }

    #[test]
    fn round_trip_mapping_is_identity() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let geo = FrameGeoreference::new(0.069, 0.37, [-4.0, 11.0], (1920, 1080)).unwrap();
        for _ in 0..10_000 {
            let p = LtpPoint::new(rng.gen_range(-100.0..100.0), rng.gen_range(-100.0..100.0));
            let back = map_pixel_to_ltp(&map_ltp_to_pixel(&p, &geo), &geo);
            assert!(back.distance(&p) < 1e-9);
        }
    }
}

//! Synthetic scene generation: a cuboid vehicle driving a waypoint path,
//! imaged by a jittering nadir camera, with ground control points,
//! correspondences and a reference trajectory written to disk.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geo::{
    map_ltp_to_pixel, map_pixel_to_ltp, FrameGeoreference, GroundControlPoint, LtpPoint, PcfPoint,
};
use crate::io;
use crate::registration::{Correspondence, SimilarityTransform};
use crate::shape::{convex_hull, DetectionShape};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VehicleSpec {
    pub length_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub ground_clearance_m: f64,
}

impl Default for VehicleSpec {
    fn default() -> Self {
        Self {
            length_m: 4.5,
            width_m: 1.8,
            height_m: 1.5,
            ground_clearance_m: crate::relief::DEFAULT_GROUND_CLEARANCE_M,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CameraSpec {
    pub altitude_m: f64,
    pub gsd_m_per_px: f64,
    pub resolution_px: [u32; 2],
    pub delta_rad: f64,
    pub offset_m: [f64; 2],
}

impl Default for CameraSpec {
    fn default() -> Self {
        Self {
            altitude_m: 100.0,
            gsd_m_per_px: 0.069,
            resolution_px: [1920, 1080],
            delta_rad: 0.0,
            offset_m: [0.0, 0.0],
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct JitterSpec {
    /// Per-frame random-walk step of the multiplicative scale (relative).
    pub scale_walk_std: f64,
    pub rotation_walk_std_rad: f64,
    pub translation_walk_std_px: f64,
}

impl Default for JitterSpec {
    fn default() -> Self {
        Self {
            scale_walk_std: 0.0,
            rotation_walk_std_rad: 0.0,
            translation_walk_std_px: 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrespondenceSpec {
    pub count: usize,
    pub outlier_fraction: f64,
    pub noise_sigma_px: f64,
}

impl Default for CorrespondenceSpec {
    fn default() -> Self {
        Self {
            count: 150,
            outlier_fraction: 0.2,
            noise_sigma_px: 0.5,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GcpSpec {
    pub count: usize,
    /// Round marked pixel coordinates to whole pixels, emulating manual
    /// annotation error.
    pub quantize_px: bool,
    pub margin_px: f64,
}

impl Default for GcpSpec {
    fn default() -> Self {
        Self {
            count: 6,
            quantize_px: true,
            margin_px: 80.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SyntheticSceneSpec {
    pub n_frames: u64,
    pub fps: f64,
    pub seed: u64,
    pub t0_utc_s: f64,
    /// Vehicle path in LTP meters; speed is constant along the polyline.
    pub waypoints: Vec<[f64; 2]>,
    pub vehicle: VehicleSpec,
    pub camera: CameraSpec,
    pub jitter: JitterSpec,
    pub correspondences: CorrespondenceSpec,
    pub gcps: GcpSpec,
    pub detection_noise_sigma_px: f64,
    /// Clock offset applied to the timestamps the pipeline believes in,
    /// relative to the true reference clock.
    pub sync_offset_s: f64,
    pub reference_rate_hz: f64,
}

impl Default for SyntheticSceneSpec {
    fn default() -> Self {
        Self {
            n_frames: 250,
            fps: 50.0,
            seed: 0,
            t0_utc_s: 1_000.0,
            waypoints: vec![[20.0, 30.0], [100.0, 50.0]],
            vehicle: VehicleSpec::default(),
            camera: CameraSpec::default(),
            jitter: JitterSpec::default(),
            correspondences: CorrespondenceSpec::default(),
            gcps: GcpSpec::default(),
            detection_noise_sigma_px: 0.0,
            sync_offset_s: 0.0,
            reference_rate_hz: 10.0,
        }
    }
}

impl SyntheticSceneSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_frames == 0 {
            return Err(Error::InvalidParameter("n_frames must be positive".into()));
        }
        if !(self.fps > 0.0) {
            return Err(Error::InvalidParameter("fps must be positive".into()));
        }
        if self.waypoints.len() < 2 {
            return Err(Error::InvalidParameter("need at least 2 waypoints".into()));
        }
        if !(self.camera.altitude_m > self.vehicle.height_m) {
            return Err(Error::InvalidParameter(
                "altitude must exceed vehicle height".into(),
            ));
        }
        if !(self.camera.gsd_m_per_px > 0.0) {
            return Err(Error::InvalidParameter("gsd must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.correspondences.outlier_fraction) {
            return Err(Error::OutOfRange {
                value: self.correspondences.outlier_fraction,
                min: 0.0,
                max: 1.0,
            });
        }
        if self.gcps.count < 2 {
            return Err(Error::InvalidParameter("need at least 2 GCPs".into()));
        }
        if !(self.reference_rate_hz > 0.0) {
            return Err(Error::InvalidParameter(
                "reference_rate_hz must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn georeference(&self) -> Result<FrameGeoreference> {
        FrameGeoreference::new(
            self.camera.gsd_m_per_px,
            self.camera.delta_rad,
            self.camera.offset_m,
            (self.camera.resolution_px[0], self.camera.resolution_px[1]),
        )
    }
}

/// Piecewise-linear path with constant speed over total duration.
struct Path2D {
    points: Vec<LtpPoint>,
    cumulative: Vec<f64>,
    total: f64,
}

impl Path2D {
    fn new(waypoints: &[[f64; 2]]) -> Result<Self> {
        let points: Vec<LtpPoint> = waypoints
            .iter()
            .map(|w| LtpPoint::new(w[0], w[1]))
            .collect();
        let mut cumulative = vec![0.0];
        for w in points.windows(2) {
            let d = w[0].distance(&w[1]);
            if d <= 0.0 {
                return Err(Error::InvalidParameter(
                    "consecutive waypoints must be distinct".into(),
                ));
            }
            cumulative.push(cumulative.last().unwrap() + d);
        }
        let total = *cumulative.last().unwrap();
        Ok(Self {
            points,
            cumulative,
            total,
        })
    }

    /// Position and heading at arc length `s`. Outside the waypoint span
    /// the path extrapolates along its end segments, so constant-speed
    /// motion stays linear in time across the whole sampled window.
    fn sample(&self, s: f64) -> (LtpPoint, f64) {
        let idx = match self
            .cumulative
            .iter()
            .position(|&c| c >= s.clamp(0.0, self.total))
            .unwrap_or(self.cumulative.len() - 1)
        {
            0 => 0,
            i => i - 1,
        };
        let a = self.points[idx];
        let b = self.points[idx + 1];
        let seg = self.cumulative[idx + 1] - self.cumulative[idx];
        let u = (s - self.cumulative[idx]) / seg;
        let pos = LtpPoint::new(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y));
        let heading = (b.y - a.y).atan2(b.x - a.x);
        (pos, heading)
    }
}

/// Project an LTP point at height `h` above ground into first-frame pixels,
/// including relief displacement away from the principal point.
pub fn project_with_relief(
    ltp: &LtpPoint,
    height_m: f64,
    geo: &FrameGeoreference,
    altitude_m: f64,
) -> PcfPoint {
    let ground = map_ltp_to_pixel(ltp, geo);
    let c = geo.principal_point();
    let factor = altitude_m / (altitude_m - height_m);
    PcfPoint::new(
        c.x + (ground.x - c.x) * factor,
        c.y + (ground.y - c.y) * factor,
    )
}

/// The true vehicle footprint rectangle (ground level) in LTP.
pub fn footprint_corners(center: &LtpPoint, heading: f64, vehicle: &VehicleSpec) -> [LtpPoint; 4] {
    let (s, c) = heading.sin_cos();
    let half = [
        (vehicle.length_m / 2.0, vehicle.width_m / 2.0),
        (vehicle.length_m / 2.0, -vehicle.width_m / 2.0),
        (-vehicle.length_m / 2.0, -vehicle.width_m / 2.0),
        (-vehicle.length_m / 2.0, vehicle.width_m / 2.0),
    ];
    half.map(|(dl, dw)| LtpPoint::new(center.x + c * dl - s * dw, center.y + s * dl + c * dw))
}

/// Pixel silhouette of the vehicle cuboid in the first-frame view:
/// convex hull of the eight displaced corner projections.
pub fn cuboid_silhouette(
    center: &LtpPoint,
    heading: f64,
    vehicle: &VehicleSpec,
    geo: &FrameGeoreference,
    altitude_m: f64,
) -> Result<Vec<PcfPoint>> {
    let base = footprint_corners(center, heading, vehicle);
    let mut pts = Vec::with_capacity(8);
    for corner in &base {
        pts.push(project_with_relief(
            corner,
            vehicle.ground_clearance_m,
            geo,
            altitude_m,
        ));
        pts.push(project_with_relief(
            corner,
            vehicle.ground_clearance_m + vehicle.height_m,
            geo,
            altitude_m,
        ));
    }
    convex_hull(&pts)
}

#[derive(Debug, Clone)]
pub struct GeneratedScene {
    pub config_path: PathBuf,
    pub gcp_path: PathBuf,
    pub detections_path: PathBuf,
    pub correspondences_path: PathBuf,
    pub reference_path: PathBuf,
    pub ground_truth_path: PathBuf,
    pub georeference: FrameGeoreference,
    /// True per-frame camera jitter, mapping first-frame pixels to
    /// current-frame pixels. Registration should recover the inverse.
    pub jitter_transforms: Vec<SimilarityTransform>,
    /// True footprint centers per frame, in LTP meters.
    pub truth_centers: Vec<LtpPoint>,
}

fn gcp_layout(spec: &GcpSpec, resolution: [u32; 2]) -> Vec<PcfPoint> {
    let m = spec.margin_px;
    let w = resolution[0] as f64;
    let h = resolution[1] as f64;
    let anchors = [
        (m, m),
        (w - m, h - m),
        (w - m, m),
        (m, h - m),
        (w / 2.0, m),
        (w / 2.0, h - m),
        (m, h / 2.0),
        (w - m, h / 2.0),
    ];
    (0..spec.count)
        .map(|i| {
            let (x, y) = anchors[i % anchors.len()];
            // Successive wraps shift inward so all points stay distinct.
            let inset = 37.0 * (i / anchors.len()) as f64;
            PcfPoint::new(x + inset, y + inset)
        })
        .collect()
}

/// Generate a full scene on disk and return paths plus ground truth.
pub fn generate_synthetic_scene(
    spec: &SyntheticSceneSpec,
    outdir: &Path,
) -> Result<GeneratedScene> {
    spec.validate()?;
    std::fs::create_dir_all(outdir)?;
    let geo = spec.georeference()?;
    let path = Path2D::new(&spec.waypoints)?;
    let duration = (spec.n_frames.saturating_sub(1)) as f64 / spec.fps;
    let speed = if duration > 0.0 {
        path.total / duration
    } else {
        0.0
    };

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let unit = Normal::new(0.0, 1.0).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let w = spec.camera.resolution_px[0] as f64;
    let h = spec.camera.resolution_px[1] as f64;
    let ux = Uniform::new(0.0, w);
    let uy = Uniform::new(0.0, h);

    // GCPs: truth LTP from the unrounded pixel, optionally quantized pixel.
    let mut gcps = Vec::new();
    for (i, pcf) in gcp_layout(&spec.gcps, spec.camera.resolution_px)
        .iter()
        .enumerate()
    {
        let ltp = map_pixel_to_ltp(pcf, &geo);
        let marked = if spec.gcps.quantize_px {
            PcfPoint::new(pcf.x.round(), pcf.y.round())
        } else {
            *pcf
        };
        gcps.push(GroundControlPoint {
            id: format!("g{i}"),
            ltp,
            pcf: marked,
        });
    }

    // Camera jitter as a random walk in log-scale / rotation / translation.
    let mut jitter_transforms = Vec::with_capacity(spec.n_frames as usize);
    let (mut log_s, mut rot, mut tx, mut ty) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for k in 0..spec.n_frames {
        if k > 0 {
            log_s += spec.jitter.scale_walk_std * unit.sample(&mut rng);
            rot += spec.jitter.rotation_walk_std_rad * unit.sample(&mut rng);
            tx += spec.jitter.translation_walk_std_px * unit.sample(&mut rng);
            ty += spec.jitter.translation_walk_std_px * unit.sample(&mut rng);
        }
        jitter_transforms.push(SimilarityTransform {
            scale: log_s.exp(),
            rotation: rot,
            translation: [tx, ty],
        });
    }

    let mut detections = Vec::with_capacity(spec.n_frames as usize);
    let mut correspondences: std::collections::BTreeMap<u64, Vec<Correspondence>> =
        std::collections::BTreeMap::new();
    let mut truth_centers = Vec::with_capacity(spec.n_frames as usize);
    let mut ground_truth_rows = Vec::with_capacity(spec.n_frames as usize);

    for k in 0..spec.n_frames {
        let t = k as f64 / spec.fps;
        let (center, heading) = path.sample(speed * t);
        truth_centers.push(center);
        ground_truth_rows.push((k, spec.t0_utc_s + t, center));

        let jit = &jitter_transforms[k as usize];
        let silhouette = cuboid_silhouette(
            &center,
            heading,
            &spec.vehicle,
            &geo,
            spec.camera.altitude_m,
        )?;
        let noisy: Vec<PcfPoint> = silhouette
            .iter()
            .map(|p| {
                let q = jit.apply(p);
                PcfPoint::new(
                    q.x + spec.detection_noise_sigma_px * unit.sample(&mut rng),
                    q.y + spec.detection_noise_sigma_px * unit.sample(&mut rng),
                )
            })
            .collect();
        detections.push(DetectionShape {
            frame_id: k,
            points: noisy,
            confidence: Some(1.0),
        });

        let mut cs = Vec::with_capacity(spec.correspondences.count);
        for _ in 0..spec.correspondences.count {
            let p_ref = PcfPoint::new(ux.sample(&mut rng), uy.sample(&mut rng));
            let p_cur = if rng.gen::<f64>() < spec.correspondences.outlier_fraction {
                PcfPoint::new(ux.sample(&mut rng), uy.sample(&mut rng))
            } else {
                let q = jit.apply(&p_ref);
                PcfPoint::new(
                    q.x + spec.correspondences.noise_sigma_px * unit.sample(&mut rng),
                    q.y + spec.correspondences.noise_sigma_px * unit.sample(&mut rng),
                )
            };
            cs.push(Correspondence { p_ref, p_cur });
        }
        correspondences.insert(k, cs);
    }

    // Reference trajectory on the true clock, padded past both ends so
    // every frame timestamp is interpolable despite the sync offset.
    let pad = 0.5 + spec.sync_offset_s.abs();
    let n_ref = ((duration + 2.0 * pad) * spec.reference_rate_hz).ceil() as usize + 1;
    let mut reference = Vec::with_capacity(n_ref);
    for i in 0..n_ref {
        let tr = -pad + i as f64 / spec.reference_rate_hz;
        let (pos, _) = path.sample(speed * tr);
        reference.push(crate::benchmark::ReferenceSample {
            t_utc_s: spec.t0_utc_s + tr,
            pos,
        });
    }

    let gcp_path = outdir.join("gcps.csv");
    let detections_path = outdir.join("detections.jsonl");
    let correspondences_path = outdir.join("correspondences.csv");
    let reference_path = outdir.join("reference.csv");
    let ground_truth_path = outdir.join("ground_truth.csv");
    let config_path = outdir.join("pipeline.toml");

    io::write_gcps(&gcp_path, &gcps)?;
    io::write_detections_polygon(&detections_path, &detections)?;
    io::write_correspondences(&correspondences_path, &correspondences)?;
    io::write_reference(&reference_path, &reference)?;
    {
        use std::io::Write as _;
        let mut f = std::io::BufWriter::new(std::fs::File::create(&ground_truth_path)?);
        writeln!(f, "frame_id,t_utc_s,x_ltp_m,y_ltp_m")?;
        for (id, t, p) in &ground_truth_rows {
            writeln!(f, "{id},{t},{},{}", p.x, p.y)?;
        }
        f.flush()?;
    }

    let config = crate::pipeline::PipelineConfig {
        inputs: crate::pipeline::InputsConfig {
            gcp: PathBuf::from("gcps.csv"),
            detections: PathBuf::from("detections.jsonl"),
            correspondences: Some(PathBuf::from("correspondences.csv")),
            reference: Some(PathBuf::from("reference.csv")),
        },
        camera: crate::pipeline::CameraConfig {
            resolution_px: spec.camera.resolution_px,
        },
        flight: crate::pipeline::FlightSection {
            altitude_m: spec.camera.altitude_m,
            focal_length_m: None,
            fps: spec.fps,
        },
        sync: crate::pipeline::SyncSection {
            // The pipeline sees a clock shifted by the sync offset.
            t0_utc_s: spec.t0_utc_s + spec.sync_offset_s,
        },
        correction: crate::pipeline::CorrectionConfig {
            mode: crate::pipeline::CorrectionMode::Approx,
            ground_clearance_m: spec.vehicle.ground_clearance_m,
            shoulder_height_m: crate::relief::DEFAULT_SHOULDER_HEIGHT_M,
            vehicle_length_m: Some(spec.vehicle.length_m),
            vehicle_width_m: Some(spec.vehicle.width_m),
        },
        mlesac: crate::pipeline::MlesacSection {
            sigma_px: spec.correspondences.noise_sigma_px.max(0.5),
            ..Default::default()
        },
        bench: Default::default(),
        run: crate::pipeline::RunSection {
            output_dir: PathBuf::from("out"),
            seed: spec.seed,
            ..Default::default()
        },
    };
    let toml_text = toml::to_string_pretty(&config).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(&config_path, toml_text)?;

    Ok(GeneratedScene {
        config_path,
        gcp_path,
        detections_path,
        correspondences_path,
        reference_path,
        ground_truth_path,
        georeference: geo,
        jitter_transforms,
        truth_centers,
    })
}

//! End-to-end orchestration: configuration, staged execution
//! (register -> extract -> map -> correct -> bench) and report emission.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::benchmark::{
    cumulative_frequency, error_statistics, position_errors, ErrorStats, SyncConfig,
};
use crate::error::{Error, Result};
use crate::geo::{estimate_georeference, FrameGeoreference, LtpPoint};
use crate::io;
use crate::registration::{
    register_sequence, FrameRegistration, MlesacParams, SimilarityTransform,
};
use crate::relief::{correct_box_approx, correct_box_known_dims, CornerHeights, ReliefContext};
use crate::shape::{
    box_center, canonicalize_corners, estimated_dims, map_box_to_ltp, min_area_rect,
    DetectionShape, VehicleDims,
};

/// Relief correction selection, as configured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorrectionMode {
    KnownDims,
    Approx,
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputsConfig {
    pub gcp: PathBuf,
    pub detections: PathBuf,
    #[serde(default)]
    pub correspondences: Option<PathBuf>,
    #[serde(default)]
    pub reference: Option<PathBuf>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CameraConfig {
    pub resolution_px: [u32; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlightSection {
    pub altitude_m: f64,
    #[serde(default)]
    pub focal_length_m: Option<f64>,
    pub fps: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyncSection {
    pub t0_utc_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CorrectionConfig {
    pub mode: CorrectionMode,
    pub ground_clearance_m: f64,
    pub shoulder_height_m: f64,
    pub vehicle_length_m: Option<f64>,
    pub vehicle_width_m: Option<f64>,
}

impl Default for CorrectionConfig {
    fn default() -> Self {
        Self {
            mode: CorrectionMode::None,
            ground_clearance_m: crate::relief::DEFAULT_GROUND_CLEARANCE_M,
            shoulder_height_m: crate::relief::DEFAULT_SHOULDER_HEIGHT_M,
            vehicle_length_m: None,
            vehicle_width_m: None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MlesacSection {
    pub iterations: usize,
    pub sigma_px: f64,
    pub outlier_span_px: f64,
    pub em_iterations: usize,
    pub min_inliers: usize,
}

impl Default for MlesacSection {
    fn default() -> Self {
        let p = MlesacParams::default();
        Self {
            iterations: p.iterations,
            sigma_px: p.sigma,
            outlier_span_px: p.outlier_span,
            em_iterations: p.em_iterations,
            min_inliers: p.min_inliers,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchSection {
    pub max_px: f64,
    pub n_bins: usize,
}

impl Default for BenchSection {
    fn default() -> Self {
        Self {
            max_px: 12.0,
            n_bins: 120,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub output_dir: PathBuf,
    /// Worker threads; 0 means all available cores.
    pub parallelism: usize,
    pub seed: u64,
    /// Disable to benchmark the unregistered ("raw") pipeline.
    pub registration: bool,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("out"),
            parallelism: 0,
            seed: 0,
            registration: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: InputsConfig,
    pub camera: CameraConfig,
    pub flight: FlightSection,
    pub sync: SyncSection,
    #[serde(default)]
    pub correction: CorrectionConfig,
    #[serde(default)]
    pub mlesac: MlesacSection,
    #[serde(default)]
    pub bench: BenchSection,
    #[serde(default)]
    pub run: RunSection,
}

/// Prefix for environment overrides: `AEROPOSE_<SECTION>__<KEY>`.
pub const ENV_PREFIX: &str = "AEROPOSE_";

fn apply_env_overrides(value: &mut toml::Value) {
    for (key, raw) in std::env::vars() {
        let Some(rest) = key.strip_prefix(ENV_PREFIX) else {
            continue;
        };
        let path: Vec<String> = rest.split("__").map(|s| s.to_ascii_lowercase()).collect();
        if path.iter().any(|s| s.is_empty()) {
            continue;
        }
        // Parse the value as a TOML scalar (`v = <raw>`); anything that does
        // not parse is taken as a plain string.
        let parsed = format!("v = {raw}")
            .parse::<toml::Value>()
            .ok()
            .and_then(|doc| doc.get("v").cloned())
            .unwrap_or(toml::Value::String(raw));
        let mut node = &mut *value;
        for seg in &path[..path.len() - 1] {
            let table = match node {
                toml::Value::Table(t) => t,
                _ => return,
            };
            node = table
                .entry(seg.clone())
                .or_insert_with(|| toml::Value::Table(Default::default()));
        }
        if let toml::Value::Table(t) = node {
            t.insert(path[path.len() - 1].clone(), parsed);
        }
    }
}

impl PipelineConfig {
    /// Parse a config file and apply `AEROPOSE_` environment overrides.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!(
                "config file not found: {}",
                path.display()
            )));
        }
        let text = std::fs::read_to_string(path)?;
        let mut value: toml::Value = text
            .parse()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        apply_env_overrides(&mut value);
        let cfg: PipelineConfig = value
            .try_into()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.flight.altitude_m > 0.0) {
            return Err(Error::Config("flight.altitude_m must be positive".into()));
        }
        if !(self.flight.fps > 0.0) {
            return Err(Error::Config("flight.fps must be positive".into()));
        }
        if self.camera.resolution_px[0] == 0 || self.camera.resolution_px[1] == 0 {
            return Err(Error::Config(
                "camera.resolution_px must be positive".into(),
            ));
        }
        if self.correction.mode == CorrectionMode::KnownDims
            && (self.correction.vehicle_length_m.is_none()
                || self.correction.vehicle_width_m.is_none())
        {
            return Err(Error::Config(
                "correction.mode = known_dims requires vehicle_length_m and vehicle_width_m".into(),
            ));
        }
        Ok(())
    }

    /// Resolve input paths relative to the config file directory and check
    /// that they exist.
    pub fn resolve_inputs(&mut self, base: &Path) -> Result<()> {
        let resolve = |p: &PathBuf| -> PathBuf {
            if p.is_absolute() {
                p.clone()
            } else {
                base.join(p)
            }
        };
        self.inputs.gcp = resolve(&self.inputs.gcp);
        self.inputs.detections = resolve(&self.inputs.detections);
        if let Some(c) = &self.inputs.correspondences {
            self.inputs.correspondences = Some(resolve(c));
        }
        if let Some(r) = &self.inputs.reference {
            self.inputs.reference = Some(resolve(r));
        }
        if !self.run.output_dir.is_absolute() {
            self.run.output_dir = base.join(&self.run.output_dir);
        }
        for p in [&self.inputs.gcp, &self.inputs.detections]
            .into_iter()
            .chain(self.inputs.correspondences.iter())
            .chain(self.inputs.reference.iter())
        {
            if !p.exists() {
                return Err(Error::MissingFile(p.clone()));
            }
        }
        Ok(())
    }

    pub fn mlesac_params(&self) -> MlesacParams {
        MlesacParams {
            iterations: self.mlesac.iterations,
            sigma: self.mlesac.sigma_px,
            outlier_span: self.mlesac.outlier_span_px,
            em_iterations: self.mlesac.em_iterations,
            min_inliers: self.mlesac.min_inliers,
            seed: self.run.seed,
        }
    }

    pub fn sync_config(&self) -> Result<SyncConfig> {
        SyncConfig::new(self.flight.fps, self.sync.t0_utc_s)
    }
}

/// One output row of the pipeline: the vehicle center per frame in the
/// raw (unregistered), registered and relief-corrected variants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub frame_id: u64,
    pub t_utc_s: f64,
    pub x_raw_m: Option<f64>,
    pub y_raw_m: Option<f64>,
    pub x_reg_m: Option<f64>,
    pub y_reg_m: Option<f64>,
    pub x_corr_m: Option<f64>,
    pub y_corr_m: Option<f64>,
    pub w_est_m: Option<f64>,
    pub l_est_m: Option<f64>,
    pub detected: bool,
    pub registered: bool,
}

impl TrajectoryRecord {
    pub fn corrected_center(&self) -> Option<LtpPoint> {
        match (self.x_corr_m, self.y_corr_m) {
            (Some(x), Some(y)) => Some(LtpPoint::new(x, y)),
            _ => None,
        }
    }

    pub fn registered_center(&self) -> Option<LtpPoint> {
        match (self.x_reg_m, self.y_reg_m) {
            (Some(x), Some(y)) => Some(LtpPoint::new(x, y)),
            _ => None,
        }
    }

    pub fn raw_center(&self) -> Option<LtpPoint> {
        match (self.x_raw_m, self.y_raw_m) {
            (Some(x), Some(y)) => Some(LtpPoint::new(x, y)),
            _ => None,
        }
    }
}

/// Benchmark block of the stats report.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StatsReport {
    pub median_px: f64,
    pub mean_px: f64,
    pub p90_px: f64,
    pub p99_px: f64,
    pub p999_px: f64,
    pub mean_m: f64,
    pub n: usize,
    pub n_excluded: usize,
    /// Worst-case synchronization slack, 1/(2*fps) seconds. Reported, never
    /// subtracted from the errors.
    pub sync_slack_s: f64,
}

impl StatsReport {
    pub fn new(stats: &ErrorStats, n_excluded: usize, sync: &SyncConfig) -> Self {
        Self {
            median_px: stats.median_px,
            mean_px: stats.mean_px,
            p90_px: stats.p90_px,
            p99_px: stats.p99_px,
            p999_px: stats.p999_px,
            mean_m: stats.mean_m,
            n: stats.n,
            n_excluded,
            sync_slack_s: sync.worst_case_slack_s(),
        }
    }
}

#[derive(Debug)]
pub struct PipelineOutput {
    pub georeference: FrameGeoreference,
    pub records: Vec<TrajectoryRecord>,
    pub registrations: Vec<FrameRegistration>,
    pub stats: Option<StatsReport>,
    pub curve: Option<Vec<(f64, f64)>>,
    pub warnings: Vec<String>,
}

fn best_detection_per_frame(shapes: Vec<DetectionShape>) -> BTreeMap<u64, DetectionShape> {
    let mut best: BTreeMap<u64, DetectionShape> = BTreeMap::new();
    for s in shapes {
        match best.get(&s.frame_id) {
            Some(b) if b.confidence.unwrap_or(1.0) >= s.confidence.unwrap_or(1.0) => {}
            _ => {
                best.insert(s.frame_id, s);
            }
        }
    }
    best
}

struct FrameOutcome {
    raw: Option<LtpPoint>,
    reg: Option<LtpPoint>,
    corr: Option<LtpPoint>,
    dims: Option<VehicleDims>,
    detected: bool,
}

fn process_frame(
    shape: Option<&DetectionShape>,
    transform: Option<&SimilarityTransform>,
    geo: &FrameGeoreference,
    correction: &CorrectionConfig,
    ctx: &ReliefContext,
) -> Result<FrameOutcome> {
    let mut out = FrameOutcome {
        raw: None,
        reg: None,
        corr: None,
        dims: None,
        detected: false,
    };
    let Some(shape) = shape else {
        return Ok(out);
    };
    let raw_box = match min_area_rect(&shape.points) {
        Ok(b) => b,
        Err(Error::Degenerate(_)) | Err(Error::EmptyInput(_)) => return Ok(out),
        Err(e) => return Err(e),
    };
    out.detected = true;
    let raw_canon = canonicalize_corners(&raw_box, geo);
    out.raw = Some(box_center(&map_box_to_ltp(&raw_canon, geo)));

    let Some(transform) = transform else {
        return Ok(out);
    };
    let reg_points = crate::registration::apply_transform_to_points(transform, &shape.points);
    let reg_box = match min_area_rect(&reg_points) {
        Ok(b) => b,
        Err(_) => return Ok(out),
    };
    let canon = canonicalize_corners(&reg_box, geo);
    out.reg = Some(box_center(&map_box_to_ltp(&canon, geo)));
    out.dims = estimated_dims(&canon, geo.gsd).ok();

    let corrected = match correction.mode {
        CorrectionMode::None => out.reg,
        CorrectionMode::KnownDims => {
            let dims = VehicleDims::new(
                correction.vehicle_width_m.unwrap_or(0.0),
                correction.vehicle_length_m.unwrap_or(0.0),
            )?;
            Some(
                correct_box_known_dims(&canon, &dims, correction.ground_clearance_m, ctx, geo)?
                    .center_ltp,
            )
        }
        CorrectionMode::Approx => {
            let heights = CornerHeights::approx_defaults(
                correction.ground_clearance_m,
                correction.shoulder_height_m,
                ctx,
            )?;
            Some(correct_box_approx(&canon, &heights, ctx, geo)?.center_ltp)
        }
    };
    out.corr = corrected;
    Ok(out)
}

/// Execute the full pipeline for one configuration. Deterministic for a
/// fixed configuration and seed; per-frame failures are isolated.
pub fn run_pipeline(config: &PipelineConfig) -> Result<PipelineOutput> {
    let mut warnings = Vec::new();

    let gcps = io::read_gcps(&config.inputs.gcp)?;
    if gcps.len() < 2 {
        return Err(Error::TooFewSamples {
            got: gcps.len(),
            need: 2,
        });
    }
    let resolution = (
        config.camera.resolution_px[0],
        config.camera.resolution_px[1],
    );
    let geo = estimate_georeference(&gcps, resolution)?;

    let detections = best_detection_per_frame(io::read_detections(&config.inputs.detections)?);
    if detections.is_empty() {
        return Err(Error::EmptyInput("detection stream".into()));
    }

    let correspondences: BTreeMap<u64, Vec<_>> = match &config.inputs.correspondences {
        Some(path) if config.run.registration => io::read_correspondences(path)?,
        _ => BTreeMap::new(),
    };

    // Frame set: everything seen in detections or correspondences.
    let mut frame_ids: Vec<u64> = detections
        .keys()
        .chain(correspondences.keys())
        .copied()
        .collect();
    frame_ids.sort_unstable();
    frame_ids.dedup();

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.run.parallelism)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;

    let registrations: Vec<FrameRegistration> =
        if config.run.registration && config.inputs.correspondences.is_some() {
            let mut seq: Vec<(u64, Vec<_>)> = frame_ids
                .iter()
                .map(|id| (*id, correspondences.get(id).cloned().unwrap_or_default()))
                .collect();
            if seq.first().map(|(id, _)| *id) != Some(0) {
                seq.insert(0, (0, Vec::new()));
            }
            pool.install(|| register_sequence(&seq, &config.mlesac_params()))?
        } else {
            // Raw mode: every frame is taken as already registered.
            frame_ids
                .iter()
                .map(|id| FrameRegistration {
                    frame_id: *id,
                    result: Ok(crate::registration::RegistrationResult {
                        transform: SimilarityTransform::identity(),
                        inlier_flags: Vec::new(),
                        score: 0.0,
                        gamma: 1.0,
                    }),
                })
                .collect()
        };
    let transforms: BTreeMap<u64, Option<SimilarityTransform>> = registrations
        .iter()
        .map(|fr| (fr.frame_id, fr.transform().copied()))
        .collect();

    let sync = config.sync_config()?;
    let ctx = ReliefContext::new(config.flight.altitude_m, resolution, geo.gsd)?;

    let outcomes: Vec<Result<FrameOutcome>> = pool.install(|| {
        frame_ids
            .par_iter()
            .map(|id| {
                process_frame(
                    detections.get(id),
                    transforms.get(id).and_then(|t| t.as_ref()),
                    &geo,
                    &config.correction,
                    &ctx,
                )
            })
            .collect()
    });

    let mut records = Vec::with_capacity(frame_ids.len());
    for (id, outcome) in frame_ids.iter().zip(outcomes) {
        let outcome = outcome?;
        let registered = transforms.get(id).is_some_and(|t| t.is_some());
        records.push(TrajectoryRecord {
            frame_id: *id,
            t_utc_s: crate::benchmark::frame_timestamp(*id, &sync),
            x_raw_m: outcome.raw.map(|p| p.x),
            y_raw_m: outcome.raw.map(|p| p.y),
            x_reg_m: outcome.reg.map(|p| p.x),
            y_reg_m: outcome.reg.map(|p| p.y),
            x_corr_m: outcome.corr.map(|p| p.x),
            y_corr_m: outcome.corr.map(|p| p.y),
            w_est_m: outcome.dims.map(|d| d.width),
            l_est_m: outcome.dims.map(|d| d.length),
            detected: outcome.detected,
            registered,
        });
    }

    let (stats, curve) = match &config.inputs.reference {
        Some(path) => {
            let reference = io::read_reference(path)?;
            let estimates: Vec<(u64, Option<LtpPoint>)> = records
                .iter()
                .map(|r| (r.frame_id, r.corrected_center()))
                .collect();
            match position_errors(&estimates, &reference, &sync, geo.gsd) {
                Ok(errs) => {
                    let stats = error_statistics(&errs.records)?;
                    let px: Vec<f64> = errs.records.iter().map(|r| r.error_px).collect();
                    let curve =
                        cumulative_frequency(&px, config.bench.max_px, config.bench.n_bins)?;
                    (
                        Some(StatsReport::new(&stats, errs.n_excluded, &sync)),
                        Some(curve),
                    )
                }
                Err(Error::EmptyInput(m)) => {
                    warnings.push(format!("benchmark skipped: {m}"));
                    (None, None)
                }
                Err(e) => return Err(e),
            }
        }
        None => (None, None),
    };

    Ok(PipelineOutput {
        georeference: geo,
        records,
        registrations,
        stats,
        curve,
        warnings,
    })
}

/// Write trajectory.csv, registration.jsonl and, when benchmarking ran,
/// stats.json, stats_table.txt and cumulative.csv.
pub fn emit_reports(output: &PipelineOutput, outdir: &Path) -> Result<Vec<String>> {
    std::fs::create_dir_all(outdir)?;
    let mut warnings = output.warnings.clone();

    let mut w =
        csv::Writer::from_writer(BufWriter::new(File::create(outdir.join("trajectory.csv"))?));
    for r in &output.records {
        w.serialize(r)
            .map_err(|e| Error::parse("trajectory.csv", e))?;
    }
    w.flush()?;

    io::write_registration_report(&outdir.join("registration.jsonl"), &output.registrations)?;

    match (&output.stats, &output.curve) {
        (Some(stats), Some(curve)) => {
            let json =
                serde_json::to_string_pretty(stats).map_err(|e| Error::parse("stats.json", e))?;
            std::fs::write(outdir.join("stats.json"), json + "\n")?;

            let mut t = BufWriter::new(File::create(outdir.join("stats_table.txt"))?);
            writeln!(t, "{:<12} {:>10}", "", "corrected")?;
            for (label, v) in [
                ("Median [px]", stats.median_px),
                ("Mean [px]", stats.mean_px),
                ("90% [px]", stats.p90_px),
                ("99% [px]", stats.p99_px),
                ("99.9% [px]", stats.p999_px),
                ("Mean [m]", stats.mean_m),
            ] {
                writeln!(t, "{label:<12} {v:>10.3}")?;
            }
            t.flush()?;

            let mut c = BufWriter::new(File::create(outdir.join("cumulative.csv"))?);
            writeln!(c, "bin_px,fraction")?;
            for (bin, frac) in curve {
                writeln!(c, "{bin},{frac}")?;
            }
            c.flush()?;
        }
        _ => warnings.push("no benchmark statistics: stats.json not written".into()),
    }
    Ok(warnings)
}

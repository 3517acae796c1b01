//! File formats: GCP / correspondence / reference CSVs, detection and
//! registration JSON lines, and the report artifacts.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::benchmark::ReferenceSample;
use crate::error::{Error, Result};
use crate::geo::{GroundControlPoint, LtpPoint, PcfPoint};
use crate::registration::{Correspondence, FrameRegistration};
use crate::shape::{DetectionShape, RotatedBox};

fn open(path: &Path) -> Result<File> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    Ok(File::open(path)?)
}

// ---------------------------------------------------------------- GCP CSV

#[derive(Debug, Serialize, Deserialize)]
struct GcpRow {
    id: String,
    x_ltp_m: f64,
    y_ltp_m: f64,
    x_pcf_px: f64,
    y_pcf_px: f64,
}

pub fn read_gcps(path: &Path) -> Result<Vec<GroundControlPoint>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for row in rdr.deserialize::<GcpRow>() {
        let row = row.map_err(|e| Error::parse(path.display().to_string(), e))?;
        out.push(GroundControlPoint {
            id: row.id,
            ltp: LtpPoint::new(row.x_ltp_m, row.y_ltp_m),
            pcf: PcfPoint::new(row.x_pcf_px, row.y_pcf_px),
        });
    }
    Ok(out)
}

pub fn write_gcps(path: &Path, gcps: &[GroundControlPoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for g in gcps {
        w.serialize(GcpRow {
            id: g.id.clone(),
            x_ltp_m: g.ltp.x,
            y_ltp_m: g.ltp.y,
            x_pcf_px: g.pcf.x,
            y_pcf_px: g.pcf.y,
        })
        .map_err(|e| Error::parse(path.display().to_string(), e))?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------- correspondence CSV

#[derive(Debug, Serialize, Deserialize)]
struct CorrespondenceRow {
    frame_id: u64,
    x_ref_px: f64,
    y_ref_px: f64,
    x_cur_px: f64,
    y_cur_px: f64,
}

pub fn read_correspondences(path: &Path) -> Result<BTreeMap<u64, Vec<Correspondence>>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out: BTreeMap<u64, Vec<Correspondence>> = BTreeMap::new();
    for row in rdr.deserialize::<CorrespondenceRow>() {
        let row = row.map_err(|e| Error::parse(path.display().to_string(), e))?;
        out.entry(row.frame_id).or_default().push(Correspondence {
            p_ref: PcfPoint::new(row.x_ref_px, row.y_ref_px),
            p_cur: PcfPoint::new(row.x_cur_px, row.y_cur_px),
        });
    }
    Ok(out)
}

pub fn write_correspondences(
    path: &Path,
    frames: &BTreeMap<u64, Vec<Correspondence>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for (frame_id, cs) in frames {
        for c in cs {
            w.serialize(CorrespondenceRow {
                frame_id: *frame_id,
                x_ref_px: c.p_ref.x,
                y_ref_px: c.p_ref.y,
                x_cur_px: c.p_cur.x,
                y_cur_px: c.p_cur.y,
            })
            .map_err(|e| Error::parse(path.display().to_string(), e))?;
        }
    }
    w.flush()?;
    Ok(())
}

// ------------------------------------------------------- detection JSONL

/// Run-length encoded mask: alternating background/foreground run lengths in
/// column-major order, starting with background.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RleMask {
    pub width: u32,
    pub height: u32,
    pub runs: Vec<u32>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DetectionRecord {
    frame_id: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    confidence: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polygon: Option<Vec<[f64; 2]>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rle: Option<RleMask>,
}

/// Boundary pixel centers of an RLE mask: foreground pixels with at least
/// one 4-neighbor outside the mask.
pub fn rle_boundary_points(rle: &RleMask) -> Vec<PcfPoint> {
    let (w, h) = (rle.width as i64, rle.height as i64);
    let mut fg: HashSet<(i64, i64)> = HashSet::new();
    let mut idx: i64 = 0;
    let mut is_fg = false;
    for &run in &rle.runs {
        if is_fg {
            for k in idx..idx + run as i64 {
                // column-major: index = x * height + y
                fg.insert((k / h, k % h));
            }
        }
        idx += run as i64;
        is_fg = !is_fg;
    }
    let mut pts: Vec<(i64, i64)> = fg
        .iter()
        .filter(|&&(x, y)| {
            [(1i64, 0i64), (-1, 0), (0, 1), (0, -1)]
                .iter()
                .any(|&(dx, dy)| {
                    let (nx, ny) = (x + dx, y + dy);
                    nx < 0 || ny < 0 || nx >= w || ny >= h || !fg.contains(&(nx, ny))
                })
        })
        .copied()
        .collect();
    pts.sort();
    pts.into_iter()
        .map(|(x, y)| PcfPoint::new(x as f64, y as f64))
        .collect()
}

pub fn read_detections(path: &Path) -> Result<Vec<DetectionShape>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DetectionRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), lineno + 1), e))?;
        let points = match (&rec.polygon, &rec.rle) {
            (Some(poly), _) => poly.iter().map(|p| PcfPoint::new(p[0], p[1])).collect(),
            (None, Some(rle)) => rle_boundary_points(rle),
            (None, None) => {
                return Err(Error::parse(
                    format!("{}:{}", path.display(), lineno + 1),
                    "detection needs either polygon or rle",
                ))
            }
        };
        out.push(DetectionShape {
            frame_id: rec.frame_id,
            points,
            confidence: rec.confidence,
        });
    }
    Ok(out)
}

pub fn write_detections_polygon(path: &Path, shapes: &[DetectionShape]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for s in shapes {
        let rec = DetectionRecord {
            frame_id: s.frame_id,
            confidence: s.confidence,
            polygon: Some(s.points.iter().map(|p| [p.x, p.y]).collect()),
            rle: None,
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| Error::parse(path.display().to_string(), e))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

// ------------------------------------------------------- reference CSV

#[derive(Debug, Serialize, Deserialize)]
struct ReferenceRow {
    t_utc_s: f64,
    x_ltp_m: f64,
    y_ltp_m: f64,
}

pub fn read_reference(path: &Path) -> Result<Vec<ReferenceSample>> {
    let mut rdr = csv::Reader::from_reader(open(path)?);
    let mut out = Vec::new();
    for row in rdr.deserialize::<ReferenceRow>() {
        let row = row.map_err(|e| Error::parse(path.display().to_string(), e))?;
        out.push(ReferenceSample {
            t_utc_s: row.t_utc_s,
            pos: LtpPoint::new(row.x_ltp_m, row.y_ltp_m),
        });
    }
    Ok(out)
}

pub fn write_reference(path: &Path, series: &[ReferenceSample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    for s in series {
        w.serialize(ReferenceRow {
            t_utc_s: s.t_utc_s,
            x_ltp_m: s.pos.x,
            y_ltp_m: s.pos.y,
        })
        .map_err(|e| Error::parse(path.display().to_string(), e))?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------- registration JSONL

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegistrationRecord {
    pub frame_id: u64,
    pub scale: Option<f64>,
    pub rotation_rad: Option<f64>,
    pub tx_px: Option<f64>,
    pub ty_px: Option<f64>,
    pub n_inliers: usize,
    pub gamma: Option<f64>,
    pub failed: bool,
}

impl From<&FrameRegistration> for RegistrationRecord {
    fn from(fr: &FrameRegistration) -> Self {
        match &fr.result {
            Ok(r) => RegistrationRecord {
                frame_id: fr.frame_id,
                scale: Some(r.transform.scale),
                rotation_rad: Some(r.transform.rotation),
                tx_px: Some(r.transform.translation[0]),
                ty_px: Some(r.transform.translation[1]),
                n_inliers: r.n_inliers(),
                gamma: Some(r.gamma),
                failed: false,
            },
            Err(_) => RegistrationRecord {
                frame_id: fr.frame_id,
                scale: None,
                rotation_rad: None,
                tx_px: None,
                ty_px: None,
                n_inliers: 0,
                gamma: None,
                failed: true,
            },
        }
    }
}

pub fn write_registration_report(path: &Path, regs: &[FrameRegistration]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for fr in regs {
        let rec = RegistrationRecord::from(fr);
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| Error::parse(path.display().to_string(), e))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_registration_report(path: &Path) -> Result<Vec<RegistrationRecord>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(
            serde_json::from_str(&line)
                .map_err(|e| Error::parse(format!("{}:{}", path.display(), lineno + 1), e))?,
        );
    }
    Ok(out)
}

// ------------------------------------------------------------ box JSONL

#[derive(Debug, Serialize, Deserialize)]
pub struct BoxRecord {
    pub frame_id: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub confidence: Option<f64>,
    pub corners: [[f64; 2]; 4],
    pub canonical: bool,
}

pub fn write_boxes(path: &Path, boxes: &[(u64, Option<f64>, RotatedBox)]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for (frame_id, confidence, rbox) in boxes {
        let c = rbox.corners();
        let rec = BoxRecord {
            frame_id: *frame_id,
            confidence: *confidence,
            corners: [0, 1, 2, 3].map(|i| [c[i].x, c[i].y]),
            canonical: rbox.is_canonical(),
        };
        serde_json::to_writer(&mut w, &rec)
            .map_err(|e| Error::parse(path.display().to_string(), e))?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_boxes(path: &Path) -> Result<Vec<(u64, Option<f64>, RotatedBox)>> {
    let reader = BufReader::new(open(path)?);
    let mut out = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: BoxRecord = serde_json::from_str(&line)
            .map_err(|e| Error::parse(format!("{}:{}", path.display(), lineno + 1), e))?;
        let corners = rec.corners.map(|c| PcfPoint::new(c[0], c[1]));
        out.push((
            rec.frame_id,
            rec.confidence,
            RotatedBox::from_corners_unchecked(corners, rec.canonical),
        ));
    }
    Ok(out)
}

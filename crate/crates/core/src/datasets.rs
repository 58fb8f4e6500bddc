//! Bench detachment forces and grasp trials: CSV ingestion, statistics and
//! a nearest-group rotation predictor.
//!
//! Both schemas are UTF-8, comma separated, with a header row. Lines starting
//! with `#` are comments.
//!
//! ```text
//! sample_no,viewpoint,force_n,b_mm,h_mm
//! sample_no,group,viewpoint,b_mm,h_mm,rotation_deg
//! ```

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Viewpoint;

pub const DETACHMENT_FILE: &str = "detachment_forces.csv";
pub const TRIALS_FV_FILE: &str = "grasp_trials_fv.csv";
pub const TRIALS_CV_FILE: &str = "grasp_trials_cv.csv";

const DETACHMENT_CSV: &str = include_str!("../data/detachment_forces.csv");
const TRIALS_FV_CSV: &str = include_str!("../data/grasp_trials_fv.csv");
const TRIALS_CV_CSV: &str = include_str!("../data/grasp_trials_cv.csv");

const DETACHMENT_HEADER: [&str; 5] = ["sample_no", "viewpoint", "force_n", "b_mm", "h_mm"];
const TRIAL_HEADER: [&str; 6] = [
    "sample_no",
    "group",
    "viewpoint",
    "b_mm",
    "h_mm",
    "rotation_deg",
];

/// One bench pull: force needed to detach a calyx-fixed fruit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetachmentRecord {
    pub sample_no: u32,
    pub viewpoint: Viewpoint,
    /// [N]
    pub force: f64,
    /// Width b [mm].
    pub width_mm: f64,
    /// Height h [mm].
    pub height_mm: f64,
}

/// Fruit size class used in the grasp trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum SizeGroup {
    Small,
    Medium,
    Large,
}

impl SizeGroup {
    pub const ALL: [SizeGroup; 3] = [SizeGroup::Small, SizeGroup::Medium, SizeGroup::Large];

    pub fn as_str(self) -> &'static str {
        match self {
            SizeGroup::Small => "Small",
            SizeGroup::Medium => "Medium",
            SizeGroup::Large => "Large",
        }
    }
}

impl fmt::Display for SizeGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SizeGroup {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "Small" => Ok(SizeGroup::Small),
            "Medium" => Ok(SizeGroup::Medium),
            "Large" => Ok(SizeGroup::Large),
            other => Err(Error::domain(
                "group",
                format!("expected Small, Medium or Large, got {other:?}"),
            )),
        }
    }
}

/// One on-arm harvesting trial: minimum wrist rotation that detached the fruit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraspTrial {
    pub sample_no: u32,
    pub group: SizeGroup,
    /// FV or CV.
    pub viewpoint: Viewpoint,
    pub width_mm: f64,
    pub height_mm: f64,
    pub rotation_deg: f64,
}

#[derive(Debug, Deserialize)]
struct DetachmentRow {
    sample_no: u32,
    viewpoint: String,
    force_n: f64,
    b_mm: f64,
    h_mm: f64,
}

#[derive(Debug, Deserialize)]
struct TrialRow {
    sample_no: u32,
    group: String,
    viewpoint: String,
    b_mm: f64,
    h_mm: f64,
    rotation_deg: f64,
}

fn reader<R: Read>(source: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(source)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map(|p| p.line()).unwrap_or(0);
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

/// Deserializes every data row, tagging each with its 1-based line number.
fn rows<R: Read, T: serde::de::DeserializeOwned>(
    source: R,
    expected: &[&str],
) -> Result<Vec<(u64, T)>> {
    let mut rdr = reader(source);
    let headers = rdr.headers().map_err(csv_error)?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header {}, got {}",
                expected.join(","),
                got.join(",")
            ),
        });
    }
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let row = rec.deserialize(Some(&headers)).map_err(|e| {
            let message = match e.kind() {
                csv::ErrorKind::Deserialize { err, .. } => match err.field() {
                    Some(i) => format!(
                        "{}: {}",
                        expected.get(i as usize).unwrap_or(&"?"),
                        err.kind()
                    ),
                    None => err.kind().to_string(),
                },
                _ => e.to_string(),
            };
            Error::Parse { line, message }
        })?;
        out.push((line, row));
    }
    Ok(out)
}

fn positive(line: u64, field: &str, v: f64) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::Parse {
            line,
            message: format!("{field}: must be > 0, got {v}"),
        })
    }
}

fn field_err(line: u64, field: &str) -> impl FnOnce(Error) -> Error + '_ {
    move |e| Error::Parse {
        line,
        message: match e {
            Error::Domain { reason, .. } => format!("{field}: {reason}"),
            other => format!("{field}: {other}"),
        },
    }
}

pub fn load_detachment_records<R: Read>(source: R) -> Result<Vec<DetachmentRecord>> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (line, row) in rows::<_, DetachmentRow>(source, &DETACHMENT_HEADER)? {
        let viewpoint: Viewpoint = row
            .viewpoint
            .parse()
            .map_err(field_err(line, "viewpoint"))?;
        let record = DetachmentRecord {
            sample_no: row.sample_no,
            viewpoint,
            force: positive(line, "force_n", row.force_n)?,
            width_mm: positive(line, "b_mm", row.b_mm)?,
            height_mm: positive(line, "h_mm", row.h_mm)?,
        };
        if !seen.insert(record.sample_no) {
            return Err(Error::Integrity(format!(
                "duplicate sample_no {}",
                record.sample_no
            )));
        }
        out.push(record);
    }
    Ok(out)
}

pub fn load_grasp_trials<R: Read>(source: R) -> Result<Vec<GraspTrial>> {
    let mut out: Vec<GraspTrial> = Vec::new();
    for (line, row) in rows::<_, TrialRow>(source, &TRIAL_HEADER)? {
        let group: SizeGroup = row.group.parse().map_err(field_err(line, "group"))?;
        let viewpoint: Viewpoint = row
            .viewpoint
            .parse()
            .map_err(field_err(line, "viewpoint"))?;
        if viewpoint == Viewpoint::BV {
            return Err(Error::Integrity(format!(
                "sample {}: grasp trials are FV or CV only, got BV",
                row.sample_no
            )));
        }
        if !(row.rotation_deg > 0.0 && row.rotation_deg < 360.0) {
            return Err(Error::Integrity(format!(
                "sample {}: rotation {} deg outside (0, 360)",
                row.sample_no, row.rotation_deg
            )));
        }
        out.push(GraspTrial {
            sample_no: row.sample_no,
            group,
            viewpoint,
            width_mm: positive(line, "b_mm", row.b_mm)?,
            height_mm: positive(line, "h_mm", row.h_mm)?,
            rotation_deg: row.rotation_deg,
        });
    }
    check_trial_keys(&out)?;
    Ok(out)
}

/// Sample numbers restart per viewpoint, so trials are keyed by (viewpoint, sample_no).
fn check_trial_keys(trials: &[GraspTrial]) -> Result<()> {
    let mut seen = HashSet::new();
    for t in trials {
        if !seen.insert((t.viewpoint, t.sample_no)) {
            return Err(Error::Integrity(format!(
                "duplicate sample_no {} for {}",
                t.sample_no, t.viewpoint
            )));
        }
    }
    Ok(())
}

/// Concatenates trial sets, rejecting duplicate (viewpoint, sample_no) keys.
pub fn merge_trials(sets: impl IntoIterator<Item = Vec<GraspTrial>>) -> Result<Vec<GraspTrial>> {
    let all: Vec<GraspTrial> = sets.into_iter().flatten().collect();
    check_trial_keys(&all)?;
    Ok(all)
}

pub fn write_detachment_records<W: Write>(records: &[DetachmentRecord], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(DETACHMENT_HEADER).map_err(csv_error)?;
    for r in records {
        w.write_record([
            r.sample_no.to_string(),
            r.viewpoint.to_string(),
            r.force.to_string(),
            r.width_mm.to_string(),
            r.height_mm.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_grasp_trials<W: Write>(trials: &[GraspTrial], sink: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(TRIAL_HEADER).map_err(csv_error)?;
    for t in trials {
        w.write_record([
            t.sample_no.to_string(),
            t.group.to_string(),
            t.viewpoint.to_string(),
            t.width_mm.to_string(),
            t.height_mm.to_string(),
            t.rotation_deg.to_string(),
        ])
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

/// The bundled bench force table, or `detachment_forces.csv` from `data_dir`.
pub fn bundled_detachment_records(data_dir: Option<&Path>) -> Result<Vec<DetachmentRecord>> {
    match data_dir {
        Some(dir) => load_detachment_records(std::fs::File::open(dir.join(DETACHMENT_FILE))?),
        None => load_detachment_records(DETACHMENT_CSV.as_bytes()),
    }
}

/// The 30 bundled grasp trials (FV then CV), or the two trial files from `data_dir`.
pub fn bundled_grasp_trials(data_dir: Option<&Path>) -> Result<Vec<GraspTrial>> {
    let (fv, cv) = match data_dir {
        Some(dir) => (
            load_grasp_trials(std::fs::File::open(dir.join(TRIALS_FV_FILE))?)?,
            load_grasp_trials(std::fs::File::open(dir.join(TRIALS_CV_FILE))?)?,
        ),
        None => (
            load_grasp_trials(TRIALS_FV_CSV.as_bytes())?,
            load_grasp_trials(TRIALS_CV_CSV.as_bytes())?,
        ),
    };
    merge_trials([fv, cv])
}

/// Sum of values in a fixed (sorted) order so results do not depend on row order.
pub(crate) fn stable_mean(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values.iter().sum::<f64>() / n
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViewpointStats {
    pub viewpoint: Viewpoint,
    pub count: usize,
    pub mean_force: f64,
    pub min_force: f64,
    pub max_force: f64,
}

/// Force statistics per viewpoint, ordered FV, CV, BV. Viewpoints without records are omitted.
pub fn viewpoint_stats(records: &[DetachmentRecord]) -> Vec<ViewpointStats> {
    let mut by_view: BTreeMap<Viewpoint, Vec<f64>> = BTreeMap::new();
    for r in records {
        by_view.entry(r.viewpoint).or_default().push(r.force);
    }
    by_view
        .into_iter()
        .map(|(viewpoint, forces)| ViewpointStats {
            viewpoint,
            count: forces.len(),
            min_force: forces.iter().copied().fold(f64::INFINITY, f64::min),
            max_force: forces.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            mean_force: stable_mean(forces),
        })
        .collect()
}

/// Rotation statistics for one size group.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupRotationStats {
    pub group: SizeGroup,
    pub fv_count: usize,
    pub cv_count: usize,
    pub fv_mean_deg: Option<f64>,
    pub cv_mean_deg: Option<f64>,
    /// CV mean over FV mean, rounded to 3 decimals; `None` unless both viewpoints are present.
    pub cv_fv_ratio: Option<f64>,
}

pub fn group_rotation_stats(trials: &[GraspTrial]) -> Result<Vec<GroupRotationStats>> {
    if trials.is_empty() {
        return Err(Error::domain("trials", "need at least one trial"));
    }
    let mut cells: BTreeMap<(SizeGroup, Viewpoint), Vec<f64>> = BTreeMap::new();
    for t in trials {
        cells
            .entry((t.group, t.viewpoint))
            .or_default()
            .push(t.rotation_deg);
    }
    let groups: Vec<SizeGroup> = SizeGroup::ALL
        .into_iter()
        .filter(|g| cells.keys().any(|(cg, _)| cg == g))
        .collect();
    Ok(groups
        .into_iter()
        .map(|group| {
            let cell = |v| cells.get(&(group, v)).cloned().unwrap_or_default();
            let (fv, cv) = (cell(Viewpoint::FV), cell(Viewpoint::CV));
            let (fv_count, cv_count) = (fv.len(), cv.len());
            let fv_mean = (!fv.is_empty()).then(|| stable_mean(fv));
            let cv_mean = (!cv.is_empty()).then(|| stable_mean(cv));
            let ratio = match (fv_mean, cv_mean) {
                (Some(f), Some(c)) if f > 0.0 => Some((c / f * 1000.0).round() / 1000.0),
                _ => None,
            };
            GroupRotationStats {
                group,
                fv_count,
                cv_count,
                fv_mean_deg: fv_mean,
                cv_mean_deg: cv_mean,
                cv_fv_ratio: ratio,
            }
        })
        .collect())
}

/// Per-group size centroid and mean rotation for one viewpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupCentroid {
    pub group: SizeGroup,
    pub width_mm: f64,
    pub height_mm: f64,
    pub mean_rotation_deg: f64,
}

pub fn group_centroids(trials: &[GraspTrial], viewpoint: Viewpoint) -> Vec<GroupCentroid> {
    // Per group: widths, heights, rotations.
    let mut cells: BTreeMap<SizeGroup, [Vec<f64>; 3]> = BTreeMap::new();
    for t in trials.iter().filter(|t| t.viewpoint == viewpoint) {
        let [b, h, rot] = cells.entry(t.group).or_default();
        b.push(t.width_mm);
        h.push(t.height_mm);
        rot.push(t.rotation_deg);
    }
    cells
        .into_iter()
        .map(|(group, [b, h, rot])| GroupCentroid {
            group,
            width_mm: stable_mean(b),
            height_mm: stable_mean(h),
            mean_rotation_deg: stable_mean(rot),
        })
        .collect()
}

/// Predicts the wrist rotation for a fruit of the given size [deg].
///
/// Returns the mean rotation of the size group whose (width, height) centroid is
/// nearest; equal distances resolve to the larger group.
pub fn required_rotation(
    trials: &[GraspTrial],
    width_mm: f64,
    height_mm: f64,
    viewpoint: Viewpoint,
) -> Result<f64> {
    if viewpoint == Viewpoint::BV {
        return Err(Error::UnavailableModel(
            "no grasp trials exist for BV".into(),
        ));
    }
    let centroids = group_centroids(trials, viewpoint);
    let mut best: Option<(f64, &GroupCentroid)> = None;
    for c in &centroids {
        let dist = (c.width_mm - width_mm).hypot(c.height_mm - height_mm);
        // Centroids come in ascending group order, so `<=` lets the larger group win ties.
        if best.is_none_or(|(d, _)| dist <= d) {
            best = Some((dist, c));
        }
    }
    best.map(|(_, c)| c.mean_rotation_deg)
        .ok_or_else(|| Error::UnavailableModel(format!("no trials recorded for {viewpoint}")))
}

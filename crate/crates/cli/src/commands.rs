//! Subcommand implementations.

use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use avogrip_core::datasets::{
    self, group_rotation_stats, load_detachment_records, load_grasp_trials, merge_trials,
    viewpoint_stats, DetachmentRecord, GraspTrial,
};
use avogrip_core::harvest::{run_campaign, HarvestConfig, RotationMode};
use avogrip_core::mechanism::{
    aperture, finger_configuration, finger_drive_force, total_grasp_moment, FingerConfiguration,
    GeometryFile, GripperGeometry,
};
use avogrip_core::model::{Bounds, SizeEnvelope};
use avogrip_core::sizing::{size_motor, suction_report, MotorFile, MotorSpec};
use avogrip_core::{DEFAULT_WRIST_SPEED, STANDARD_ATMOSPHERE_PA};
use clap::Args;
use serde::Serialize;

use crate::output::{Cell, Format, Report, Table};
use crate::svg::{line_chart, Series};
use crate::{CliError, Command, CommonArgs, DATA_DIR_ENV};

/// Keyword selecting the data sets shipped with the library.
const BUNDLED: &str = "bundled";

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a finite number > 0, got {s}"))
    }
}

#[derive(Debug, Args)]
pub struct MechArgs {
    /// Geometry JSON (mm, deg); the reference gripper when omitted.
    #[arg(long, value_name = "PATH")]
    geom: Option<PathBuf>,
    /// Motor torque [N·m].
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    torque: f64,
    /// Encoder angle between OA and AB [deg].
    #[arg(long = "alpha-deg", allow_negative_numbers = true)]
    alpha_deg: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_name = "PATH")]
    geom: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    torque: f64,
    /// Encoder angle increment [deg].
    #[arg(long = "step-deg", default_value_t = 0.5, value_parser = positive)]
    step_deg: f64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Bench detachment force CSV, or `bundled`.
    #[arg(long, default_value = BUNDLED, value_name = "PATH|bundled")]
    forces: String,
    /// Grasp trial CSVs, or `bundled`; repeat to merge several files.
    #[arg(long, default_values_t = [BUNDLED.to_string()], num_args = 1.., value_name = "PATH|bundled")]
    trials: Vec<String>,
}

#[derive(Debug, Args)]
pub struct SizeMotorArgs {
    #[arg(long, value_name = "PATH")]
    geom: Option<PathBuf>,
    #[arg(long = "height-min-mm", default_value_t = 64.5)]
    height_min_mm: f64,
    #[arg(long = "height-max-mm", default_value_t = 129.9)]
    height_max_mm: f64,
    #[arg(long = "width-min-mm", default_value_t = 53.8)]
    width_min_mm: f64,
    #[arg(long = "width-max-mm", default_value_t = 99.8)]
    width_max_mm: f64,
    #[arg(long = "mass-min-kg", default_value_t = 0.2)]
    mass_min_kg: f64,
    #[arg(long = "mass-max-kg", default_value_t = 0.3)]
    mass_max_kg: f64,
    /// Pull force the grasp has to resist [N].
    #[arg(
        long = "detach-force-n",
        default_value_t = 9.6,
        allow_negative_numbers = true
    )]
    detach_force_n: f64,
    /// Wrist angular acceleration [rad/s²].
    #[arg(
        long = "angular-accel",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    angular_accel: f64,
    /// Multiplier on the worst-case torque (>= 1).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    safety: f64,
}

#[derive(Debug, Args)]
#[command(group = clap::ArgGroup::new("motor_source").required(true).args(["motor", "torque_nm"]))]
pub struct SimulateArgs {
    /// Grasp trial CSVs, or `bundled`; repeat to merge several files.
    #[arg(long, default_values_t = [BUNDLED.to_string()], num_args = 1.., value_name = "PATH|bundled")]
    trials: Vec<String>,
    /// Geometry JSON (mm, deg); the harvest gripper when omitted.
    #[arg(long, value_name = "PATH")]
    geom: Option<PathBuf>,
    /// Motor JSON, e.g. the output of `size-motor`.
    #[arg(long, value_name = "PATH")]
    motor: Option<PathBuf>,
    /// Rated motor torque [N·m], instead of --motor.
    #[arg(long = "torque-nm", allow_negative_numbers = true)]
    torque_nm: Option<f64>,
    /// Wrist speed while detaching [rad/s].
    #[arg(long = "wrist-speed", default_value_t = DEFAULT_WRIST_SPEED, allow_negative_numbers = true)]
    wrist_speed: f64,
    /// Mass assigned to every fruit [kg].
    #[arg(
        long = "mass-kg",
        default_value_t = 0.25,
        allow_negative_numbers = true
    )]
    mass_kg: f64,
    /// Predict the rotation from the nearest size group instead of replaying it.
    #[arg(long)]
    predict: bool,
    /// Pull force behind the holding threshold [N].
    #[arg(
        long = "holding-force-n",
        default_value_t = 9.6,
        allow_negative_numbers = true
    )]
    holding_force_n: f64,
    #[arg(
        long = "angular-accel",
        default_value_t = 0.0,
        allow_negative_numbers = true
    )]
    angular_accel: f64,
    /// Wrist travel available for detaching [deg].
    #[arg(
        long = "max-rotation-deg",
        default_value_t = 360.0,
        allow_negative_numbers = true
    )]
    max_rotation_deg: f64,
}

#[derive(Debug, Args)]
pub struct SuctionArgs {
    /// Effective suction diameter [mm].
    #[arg(
        long = "diameter-mm",
        default_value_t = 16.8,
        allow_negative_numbers = true
    )]
    diameter_mm: f64,
    /// Absolute pressure reached by the pump [Pa].
    #[arg(
        long = "vacuum-pa",
        default_value_t = 5.0,
        allow_negative_numbers = true
    )]
    vacuum_pa: f64,
    #[arg(long = "atmospheric-pa", default_value_t = STANDARD_ATMOSPHERE_PA, allow_negative_numbers = true)]
    atmospheric_pa: f64,
}

pub fn run(command: &Command, common: &CommonArgs) -> Result<(), CliError> {
    if common.plot.is_some() && !matches!(command, Command::Sweep(_)) {
        return Err(CliError::Usage("--plot is only supported by sweep".into()));
    }
    let (report, default_format) = match command {
        Command::Mech(a) => (mech(a)?, Format::Json),
        Command::Sweep(a) => (sweep(a, common.plot.as_deref())?, Format::Csv),
        Command::Stats(a) => (stats(a)?, Format::Json),
        Command::SizeMotor(a) => (size(a)?, Format::Json),
        Command::Simulate(a) => (simulate(a)?, Format::Json),
        Command::Suction(a) => (suction(a)?, Format::Json),
    };
    let text = report.render(common.format.unwrap_or(default_format));
    match &common.output {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<File, CliError> {
    File::open(path).map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> Result<String, CliError> {
    io::read_to_string(open(path)?)
        .map_err(|e| CliError::NoInput(format!("{}: {e}", path.display())))
}

fn load_geometry(
    path: Option<&Path>,
    default: GripperGeometry,
) -> Result<GripperGeometry, CliError> {
    match path {
        Some(p) => Ok(GeometryFile::from_json(&read_text(p)?)?),
        None => Ok(default),
    }
}

fn data_dir() -> Option<PathBuf> {
    std::env::var_os(DATA_DIR_ENV).map(PathBuf::from)
}

fn load_forces(source: &str) -> Result<Vec<DetachmentRecord>, CliError> {
    let path = match (source, data_dir()) {
        (BUNDLED, None) => return Ok(datasets::bundled_detachment_records(None)?),
        (BUNDLED, Some(dir)) => dir.join(datasets::DETACHMENT_FILE),
        (p, _) => PathBuf::from(p),
    };
    Ok(load_detachment_records(open(&path)?)?)
}

fn load_trials(sources: &[String]) -> Result<Vec<GraspTrial>, CliError> {
    let mut sets = Vec::new();
    for source in sources {
        match (source.as_str(), data_dir()) {
            (BUNDLED, None) => sets.push(datasets::bundled_grasp_trials(None)?),
            (BUNDLED, Some(dir)) => {
                for name in [datasets::TRIALS_FV_FILE, datasets::TRIALS_CV_FILE] {
                    sets.push(load_grasp_trials(open(&dir.join(name))?)?);
                }
            }
            (p, _) => sets.push(load_grasp_trials(open(Path::new(p))?)?),
        }
    }
    Ok(merge_trials(sets)?)
}

#[derive(Debug, Serialize)]
struct LoadOut {
    tangent_force_n: f64,
    pinion_torque_nm: f64,
    finger_force_n: f64,
    radial_force_moment_free: bool,
}

#[derive(Debug, Serialize)]
struct ConfigurationOut {
    alpha_deg: f64,
    d_m: f64,
    angle_abo_deg: f64,
    gamma_deg: f64,
    theta_deg: f64,
    cos_theta: f64,
}

#[derive(Debug, Serialize)]
struct MechReport {
    geometry: GeometryFile,
    motor_torque_nm: f64,
    finger_load: LoadOut,
    configuration: ConfigurationOut,
    aperture_m: f64,
    total_moment_nm: f64,
}

/// One evaluated encoder angle, shared by `mech` and `sweep` so both print the same numbers.
#[derive(Debug, Clone, Copy, Serialize)]
struct SweepRow {
    alpha_deg: f64,
    d_m: f64,
    theta_deg: f64,
    aperture_m: f64,
    moment_nm: f64,
}

fn evaluate(
    geom: &GripperGeometry,
    torque: f64,
    alpha: f64,
) -> Result<(SweepRow, FingerConfiguration), CliError> {
    let conf = finger_configuration(geom, alpha)?;
    let row = SweepRow {
        alpha_deg: alpha.to_degrees(),
        d_m: conf.d,
        theta_deg: conf.theta.to_degrees(),
        aperture_m: aperture(geom, alpha)?,
        moment_nm: total_grasp_moment(geom, torque, alpha)?,
    };
    Ok((row, conf))
}

fn mech(a: &MechArgs) -> Result<Report, CliError> {
    let geom = load_geometry(a.geom.as_deref(), GripperGeometry::reference())?;
    let load = finger_drive_force(&geom, a.torque)?;
    let alpha = a.alpha_deg.to_radians();
    let (row, conf) = evaluate(&geom, a.torque, alpha)?;
    let (angle_abo_deg, gamma_deg) = (conf.angle_abo.to_degrees(), conf.gamma.to_degrees());
    let report = MechReport {
        geometry: GeometryFile::from(&geom),
        motor_torque_nm: a.torque,
        finger_load: LoadOut {
            tangent_force_n: load.tangent_force,
            pinion_torque_nm: load.pinion_torque,
            finger_force_n: load.finger_force,
            radial_force_moment_free: load.radial_force_moment_free,
        },
        configuration: ConfigurationOut {
            alpha_deg: a.alpha_deg,
            d_m: row.d_m,
            angle_abo_deg,
            gamma_deg,
            theta_deg: row.theta_deg,
            cos_theta: conf.theta.cos(),
        },
        aperture_m: row.aperture_m,
        total_moment_nm: row.moment_nm,
    };
    let mut t = Table::new(vec![
        "alpha_deg",
        "motor_torque_nm",
        "tangent_force_n",
        "pinion_torque_nm",
        "finger_force_n",
        "d_m",
        "angle_abo_deg",
        "gamma_deg",
        "theta_deg",
        "aperture_m",
        "total_moment_nm",
    ]);
    t.push(vec![
        a.alpha_deg.into(),
        a.torque.into(),
        load.tangent_force.into(),
        load.pinion_torque.into(),
        load.finger_force.into(),
        row.d_m.into(),
        angle_abo_deg.into(),
        gamma_deg.into(),
        row.theta_deg.into(),
        row.aperture_m.into(),
        row.moment_nm.into(),
    ]);
    Ok(Report::new(&report, vec![t]))
}

/// Encoder angles from the range start in fixed steps, in degrees.
///
/// Each angle is computed as start + i·step rather than by accumulation, so a
/// whole-degree start with a step dividing the offset lands exactly on the
/// angle `mech` would be given.
fn sweep_angles(geom: &GripperGeometry, step_deg: f64) -> Vec<f64> {
    let (lo, hi) = geom.alpha_range();
    let snap = |x: f64| (x * 1e9).round() / 1e9;
    let (start, end) = (snap(lo.to_degrees()), snap(hi.to_degrees()));
    let n = ((end - start) / step_deg + 1e-9).floor() as usize;
    (0..=n).map(|i| start + i as f64 * step_deg).collect()
}

fn sweep(a: &SweepArgs, plot: Option<&Path>) -> Result<Report, CliError> {
    let geom = load_geometry(a.geom.as_deref(), GripperGeometry::reference())?;
    // Validates the torque even though only the moment column uses it.
    finger_drive_force(&geom, a.torque)?;
    let (lo, hi) = geom.alpha_range();
    let rows = sweep_angles(&geom, a.step_deg)
        .into_iter()
        .map(|deg| {
            let (mut row, _) = evaluate(&geom, a.torque, deg.to_radians().clamp(lo, hi))?;
            row.alpha_deg = deg;
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    if let Some(path) = plot {
        let chart = line_chart(
            "encoder angle alpha [deg]",
            &[
                Series {
                    label: "aperture [mm]",
                    color: "#1f77b4",
                    points: rows
                        .iter()
                        .map(|r| (r.alpha_deg, r.aperture_m * 1000.0))
                        .collect(),
                },
                Series {
                    label: "total grasp moment [N·m]",
                    color: "#d62728",
                    points: rows.iter().map(|r| (r.alpha_deg, r.moment_nm)).collect(),
                },
            ],
        );
        write_file(path, &chart)?;
    }

    let mut t = Table::new(vec![
        "alpha_deg",
        "d_m",
        "theta_deg",
        "aperture_m",
        "moment_nm",
    ]);
    for r in &rows {
        t.push(vec![
            r.alpha_deg.into(),
            r.d_m.into(),
            r.theta_deg.into(),
            r.aperture_m.into(),
            r.moment_nm.into(),
        ]);
    }
    Ok(Report::new(&rows, vec![t]))
}

#[derive(Debug, Serialize)]
struct StatsReport {
    viewpoint_forces: Vec<datasets::ViewpointStats>,
    rotation: Vec<datasets::GroupRotationStats>,
}

fn stats(a: &StatsArgs) -> Result<Report, CliError> {
    let forces = viewpoint_stats(&load_forces(&a.forces)?);
    let rotation = group_rotation_stats(&load_trials(&a.trials)?)?;

    let mut ft = Table::new(vec![
        "viewpoint",
        "count",
        "mean_force_n",
        "min_force_n",
        "max_force_n",
    ]);
    for s in &forces {
        ft.push(vec![
            s.viewpoint.as_str().into(),
            s.count.into(),
            s.mean_force.into(),
            s.min_force.into(),
            s.max_force.into(),
        ]);
    }
    let mut rt = Table::new(vec![
        "group",
        "fv_count",
        "cv_count",
        "fv_mean_deg",
        "cv_mean_deg",
        "cv_fv_ratio",
    ]);
    for s in &rotation {
        rt.push(vec![
            s.group.as_str().into(),
            s.fv_count.into(),
            s.cv_count.into(),
            s.fv_mean_deg.into(),
            s.cv_mean_deg.into(),
            s.cv_fv_ratio.into(),
        ]);
    }
    Ok(Report::new(
        &StatsReport {
            viewpoint_forces: forces,
            rotation,
        },
        vec![ft, rt],
    ))
}

fn size(a: &SizeMotorArgs) -> Result<Report, CliError> {
    let geom = load_geometry(a.geom.as_deref(), GripperGeometry::reference())?;
    let envelope = SizeEnvelope::new(
        Bounds::new("height", a.height_min_mm / 1000.0, a.height_max_mm / 1000.0)?,
        Bounds::new("width", a.width_min_mm / 1000.0, a.width_max_mm / 1000.0)?,
        Bounds::new("mass", a.mass_min_kg, a.mass_max_kg)?,
    );
    let spec = size_motor(
        &geom,
        &envelope,
        a.detach_force_n,
        a.angular_accel,
        a.safety,
    )?;
    let file = MotorFile::from(&spec);

    let mut t = Table::new(vec![
        "rated_torque_nm",
        "safety_factor",
        "required_torque_nm",
        "worst_case_alpha_deg",
        "worst_case_width_mm",
        "worst_case_height_mm",
        "worst_case_mass_kg",
        "worst_case_label",
    ]);
    let fruit = file.worst_case_fruit.as_ref();
    t.push(vec![
        file.rated_torque_nm.into(),
        file.safety_factor.into(),
        file.required_torque_nm.into(),
        file.worst_case_alpha_deg.into(),
        fruit.map(|f| f.width_mm).into(),
        fruit.map(|f| f.height_mm).into(),
        fruit.map(|f| f.mass_kg).into(),
        fruit.map_or(Cell::Empty, |f| f.label.as_str().into()),
    ]);
    Ok(Report::new(&file, vec![t]))
}

fn simulate(a: &SimulateArgs) -> Result<Report, CliError> {
    let trials = load_trials(&a.trials)?;
    let geom = load_geometry(a.geom.as_deref(), GripperGeometry::harvest())?;
    let motor = match (&a.motor, a.torque_nm) {
        (Some(path), _) => MotorFile::from_json(&read_text(path)?)?,
        (None, Some(t)) => MotorSpec::rated(t)?,
        (None, None) => unreachable!("clap requires one motor source"),
    };
    let config = HarvestConfig {
        holding_force: a.holding_force_n,
        angular_accel: a.angular_accel,
        max_wrist_rotation_deg: a.max_rotation_deg,
        rotation_mode: if a.predict {
            RotationMode::Predict
        } else {
            RotationMode::Replay
        },
        ..HarvestConfig::default()
    };
    let report = run_campaign(&trials, &geom, &motor, a.wrist_speed, a.mass_kg, &config)?;

    let mut t = Table::new(vec![
        "group",
        "viewpoint",
        "sample_no",
        "width_mm",
        "height_mm",
        "recorded_rotation_deg",
        "success",
        "final_state",
        "closure_alpha_deg",
        "applied_moment_nm",
        "holding_threshold_nm",
        "wrist_rotation_deg",
        "detach_time_s",
        "elapsed_s",
    ]);
    for tr in &report.trials {
        let o = &tr.outcome;
        t.push(vec![
            tr.group.as_str().into(),
            tr.viewpoint.as_str().into(),
            tr.sample_no.into(),
            tr.width_mm.into(),
            tr.height_mm.into(),
            tr.recorded_rotation_deg.into(),
            o.success.into(),
            o.final_state.to_string().into(),
            o.closure_alpha.map(f64::to_degrees).into(),
            o.applied_moment.into(),
            o.holding_threshold.into(),
            o.wrist_rotation_deg.into(),
            o.detach_time_s.into(),
            o.elapsed_s.into(),
        ]);
    }
    Ok(Report::new(&report, vec![t]))
}

fn suction(a: &SuctionArgs) -> Result<Report, CliError> {
    let r = suction_report(a.vacuum_pa, a.diameter_mm / 1000.0, a.atmospheric_pa)?;
    let mut t = Table::new(vec![
        "vacuum_pressure_pa",
        "atmospheric_pa",
        "pressure_difference_pa",
        "diameter_m",
        "area_m2",
        "force_n",
        "reported_force_n",
        "reported_force_diameter_m",
        "consistent_with_reported",
        "note",
    ]);
    t.push(vec![
        r.vacuum_pressure_pa.into(),
        r.atmospheric_pa.into(),
        r.pressure_difference_pa.into(),
        r.diameter_m.into(),
        r.area_m2.into(),
        r.force_n.into(),
        r.reported_force_n.into(),
        r.reported_force_diameter_m.into(),
        r.consistent_with_reported.into(),
        r.note.as_str().into(),
    ]);
    Ok(Report::new(&r, vec![t]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_hits_whole_degrees_exactly() {
        let angles = sweep_angles(&GripperGeometry::reference(), 0.5);
        assert_eq!(angles.first(), Some(&13.0));
        assert_eq!(angles.last(), Some(&110.0));
        assert_eq!(angles.len(), 195);
        assert!(angles.contains(&60.0));
        assert!(angles.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn sweep_stops_inside_the_range() {
        let angles = sweep_angles(&GripperGeometry::reference(), 7.0);
        assert_eq!(angles.last(), Some(&104.0));
    }

    #[test]
    fn positive_parser_rejects_zero_and_nan() {
        assert!(positive("0").is_err());
        assert!(positive("-1").is_err());
        assert!(positive("NaN").is_err());
        assert_eq!(positive("0.25"), Ok(0.25));
    }
}

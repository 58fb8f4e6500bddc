//! Motor sizing, detachment budgets, detach timing and the suction-cup comparison.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{finger_configuration, GripperGeometry};
use crate::model::{cylinder_from_fruit, CylinderFruit, InertiaAxis, SizeEnvelope};
use crate::search;

/// Suction force quoted for the vacuum-tube rig [N].
pub const REPORTED_SUCTION_FORCE_N: f64 = 28.60;
/// Inner diameter of the vacuum tube [m].
pub const VACUUM_TUBE_DIAMETER: f64 = 0.0168;
/// Diameter of the silicone suction cup [m].
pub const SUCTION_CUP_DIAMETER: f64 = 0.0445;
/// Ultimate vacuum of the single-stage pump [Pa].
pub const PUMP_ULTIMATE_VACUUM_PA: f64 = 5.0;

/// Coarse alpha grid step for motor sizing.
pub const SIZING_GRID_STEP: f64 = PI / 180.0;
/// Golden-section refinement tolerance [rad].
pub const SIZING_REFINE_TOL: f64 = 1e-4;

/// Moment the gripper must supply to detach a fruit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetachBudget {
    /// Detach force times lever arm [N·m].
    pub holding_moment: f64,
    /// Transverse inertia times angular acceleration [N·m].
    pub inertial_moment: f64,
    pub total: f64,
}

fn check_non_negative(field: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::domain(
            field,
            format!("must be finite and >= 0, got {v}"),
        ))
    }
}

/// Budget with the lever arm at half the fruit height (centroid to calyx).
pub fn detach_budget(
    fruit: &CylinderFruit,
    detach_force: f64,
    angular_accel: f64,
) -> Result<DetachBudget> {
    detach_budget_with_lever(fruit, detach_force, angular_accel, fruit.height() / 2.0)
}

pub fn detach_budget_with_lever(
    fruit: &CylinderFruit,
    detach_force: f64,
    angular_accel: f64,
    lever_arm: f64,
) -> Result<DetachBudget> {
    check_non_negative("detach_force", detach_force)?;
    check_non_negative("angular_accel", angular_accel)?;
    check_non_negative("lever_arm", lever_arm)?;
    let holding_moment = detach_force * lever_arm;
    let inertial_moment = fruit.moment_of_inertia(InertiaAxis::Transverse) * angular_accel;
    Ok(DetachBudget {
        holding_moment,
        inertial_moment,
        total: holding_moment + inertial_moment,
    })
}

/// Motor torque that makes [`crate::mechanism::total_grasp_moment`] equal `target_moment` at `alpha`.
pub fn required_motor_torque(
    geom: &GripperGeometry,
    alpha: f64,
    target_moment: f64,
) -> Result<f64> {
    check_non_negative("target_moment", target_moment)?;
    let conf = finger_configuration(geom, alpha)?;
    let cos_theta = conf.theta.cos();
    if cos_theta <= 0.0 {
        return Err(Error::NonTransmitting {
            alpha_deg: alpha.to_degrees(),
            cos_theta,
        });
    }
    let n = f64::from(geom.finger_count());
    Ok(target_moment * geom.ring_radius() * geom.finger_offset()
        / (n * geom.pinion_radius() * cos_theta * conf.d))
}

/// Selected motor rating and the configuration that drove it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MotorSpec {
    /// Safety factor times the worst-case required torque [N·m].
    pub rated_torque: f64,
    pub safety_factor: f64,
    /// Worst-case required torque before the safety factor [N·m].
    pub required_torque: Option<f64>,
    pub worst_case_alpha: Option<f64>,
    pub worst_case_fruit: Option<CylinderFruit>,
}

impl MotorSpec {
    /// A motor known only by its rating, e.g. taken from a datasheet.
    pub fn rated(rated_torque: f64) -> Result<Self> {
        check_non_negative("rated_torque", rated_torque)?;
        Ok(Self {
            rated_torque,
            safety_factor: 1.0,
            required_torque: None,
            worst_case_alpha: None,
            worst_case_fruit: None,
        })
    }
}

/// One evaluated (alpha, fruit) pair of the sizing grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SizingPoint {
    pub alpha: f64,
    pub fruit_index: usize,
    pub required_torque: f64,
}

/// Largest required torque; ties go to the smaller alpha, then the smaller fruit index.
///
/// Gives the same answer for any ordering of `points`.
pub fn worst_point(points: &[SizingPoint]) -> Option<SizingPoint> {
    points.iter().copied().reduce(|best, p| {
        let better = p
            .required_torque
            .total_cmp(&best.required_torque)
            .then(best.alpha.total_cmp(&p.alpha))
            .then(best.fruit_index.cmp(&p.fruit_index));
        if better.is_gt() {
            p
        } else {
            best
        }
    })
}

/// Alpha values visited by the coarse sizing sweep: 1° steps from the lower limit, plus the upper limit.
pub fn sizing_grid(geom: &GripperGeometry) -> Vec<f64> {
    let (lo, hi) = geom.alpha_range();
    let steps = ((hi - lo) / SIZING_GRID_STEP + 1e-9).floor() as usize;
    let mut grid: Vec<f64> = (0..=steps)
        .map(|k| lo + k as f64 * SIZING_GRID_STEP)
        .collect();
    if hi - grid[grid.len() - 1] > 1e-12 {
        grid.push(hi);
    }
    grid
}

/// Sizes the grasp motor for the worst (alpha, fruit) combination.
///
/// Every alpha of [`sizing_grid`] that transmits a closing moment is paired with
/// each envelope corner. The maximizing alpha is then refined by golden-section
/// search between its transmitting grid neighbours. Alphas where cos θ <= 0 are
/// skipped: the required torque grows without bound as θ approaches 90°, so the
/// search stays on the span of transmitting grid points.
pub fn size_motor(
    geom: &GripperGeometry,
    envelope: &SizeEnvelope,
    detach_force: f64,
    angular_accel: f64,
    safety_factor: f64,
) -> Result<MotorSpec> {
    if !(safety_factor.is_finite() && safety_factor >= 1.0) {
        return Err(Error::domain(
            "safety_factor",
            format!("must be >= 1, got {safety_factor}"),
        ));
    }
    let fruits = envelope.corners();
    let budgets = fruits
        .iter()
        .map(|f| detach_budget(f, detach_force, angular_accel).map(|b| b.total))
        .collect::<Result<Vec<_>>>()?;

    let grid = sizing_grid(geom);
    let transmitting: Vec<bool> = grid
        .iter()
        .map(|&a| required_motor_torque(geom, a, 1.0).is_ok())
        .collect();
    if !transmitting.iter().any(|&t| t) {
        let (lo, _) = geom.alpha_range();
        let cos_theta = finger_configuration(geom, lo)?.theta.cos();
        return Err(Error::NonTransmitting {
            alpha_deg: lo.to_degrees(),
            cos_theta,
        });
    }

    let points: Vec<SizingPoint> = grid
        .par_iter()
        .zip(transmitting.par_iter())
        .filter(|(_, &t)| t)
        .flat_map_iter(|(&alpha, _)| {
            budgets
                .iter()
                .enumerate()
                .map(move |(fruit_index, &target)| SizingPoint {
                    alpha,
                    fruit_index,
                    required_torque: required_motor_torque(geom, alpha, target)
                        .expect("alpha checked as transmitting"),
                })
        })
        .collect();
    let coarse = worst_point(&points).expect("at least one transmitting grid point");

    let k = grid
        .iter()
        .position(|&a| a == coarse.alpha)
        .expect("worst point comes from the grid");
    let left = if k > 0 && transmitting[k - 1] {
        grid[k - 1]
    } else {
        grid[k]
    };
    let right = if k + 1 < grid.len() && transmitting[k + 1] {
        grid[k + 1]
    } else {
        grid[k]
    };
    let target = budgets[coarse.fruit_index];
    let (alpha_ref, torque_ref) = search::golden_section_max(
        |a| required_motor_torque(geom, a, target).unwrap_or(f64::NEG_INFINITY),
        left,
        right,
        SIZING_REFINE_TOL,
    );
    let (alpha, required) = if torque_ref > coarse.required_torque {
        (alpha_ref, torque_ref)
    } else {
        (coarse.alpha, coarse.required_torque)
    };

    Ok(MotorSpec {
        rated_torque: safety_factor * required,
        safety_factor,
        required_torque: Some(required),
        worst_case_alpha: Some(alpha),
        worst_case_fruit: Some(fruits[coarse.fruit_index].clone()),
    })
}

/// Time to turn the wrist through `rotation_deg` at `wrist_speed` rad/s.
pub fn detach_time(rotation_deg: f64, wrist_speed: f64) -> Result<f64> {
    check_non_negative("rotation", rotation_deg)?;
    if !(wrist_speed.is_finite() && wrist_speed > 0.0) {
        return Err(Error::domain(
            "wrist_speed",
            format!("must be > 0, got {wrist_speed}"),
        ));
    }
    Ok(rotation_deg.to_radians() / wrist_speed)
}

fn check_pressures(vacuum_pressure: f64, atmospheric: f64) -> Result<()> {
    check_non_negative("vacuum_pressure", vacuum_pressure)?;
    if !(atmospheric.is_finite() && vacuum_pressure < atmospheric) {
        return Err(Error::domain(
            "vacuum_pressure",
            format!("must be below atmospheric {atmospheric} Pa, got {vacuum_pressure}"),
        ));
    }
    Ok(())
}

/// `F = ΔP · π (d/2)²` [N].
pub fn suction_force(
    vacuum_pressure: f64,
    effective_diameter: f64,
    atmospheric: f64,
) -> Result<f64> {
    check_pressures(vacuum_pressure, atmospheric)?;
    if !(effective_diameter.is_finite() && effective_diameter > 0.0) {
        return Err(Error::domain(
            "effective_diameter",
            format!("must be > 0, got {effective_diameter}"),
        ));
    }
    let radius = effective_diameter / 2.0;
    Ok((atmospheric - vacuum_pressure) * PI * radius * radius)
}

/// Diameter whose area yields `force` at the given pressures [m].
pub fn effective_suction_diameter(
    force: f64,
    vacuum_pressure: f64,
    atmospheric: f64,
) -> Result<f64> {
    check_pressures(vacuum_pressure, atmospheric)?;
    check_non_negative("force", force)?;
    Ok(2.0 * (force / ((atmospheric - vacuum_pressure) * PI)).sqrt())
}

/// Suction estimate set against the quoted 28.60 N rig figure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuctionReport {
    pub vacuum_pressure_pa: f64,
    pub atmospheric_pa: f64,
    pub pressure_difference_pa: f64,
    pub diameter_m: f64,
    pub area_m2: f64,
    pub force_n: f64,
    pub reported_force_n: f64,
    /// Diameter that reproduces the reported force at these pressures [m].
    pub reported_force_diameter_m: f64,
    /// False when the computed and reported forces differ by more than 1 %.
    pub consistent_with_reported: bool,
    pub note: String,
}

pub fn suction_report(
    vacuum_pressure: f64,
    diameter: f64,
    atmospheric: f64,
) -> Result<SuctionReport> {
    let force = suction_force(vacuum_pressure, diameter, atmospheric)?;
    let back = effective_suction_diameter(REPORTED_SUCTION_FORCE_N, vacuum_pressure, atmospheric)?;
    let consistent = ((force - REPORTED_SUCTION_FORCE_N) / REPORTED_SUCTION_FORCE_N).abs() <= 0.01;
    let note = if consistent {
        "computed force agrees with the reported 28.60 N within 1%".to_string()
    } else {
        format!(
            "computed {force:.3} N disagrees with the reported 28.60 N; that figure needs an effective diameter of {:.3} cm, not the {:.2} cm tube or the {:.2} cm cup",
            back * 100.0,
            VACUUM_TUBE_DIAMETER * 100.0,
            SUCTION_CUP_DIAMETER * 100.0,
        )
    };
    Ok(SuctionReport {
        vacuum_pressure_pa: vacuum_pressure,
        atmospheric_pa: atmospheric,
        pressure_difference_pa: atmospheric - vacuum_pressure,
        diameter_m: diameter,
        area_m2: PI * diameter * diameter / 4.0,
        force_n: force,
        reported_force_n: REPORTED_SUCTION_FORCE_N,
        reported_force_diameter_m: back,
        consistent_with_reported: consistent,
        note,
    })
}

/// Fruit description in a motor file, millimetres and kilograms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FruitFile {
    pub width_mm: f64,
    pub height_mm: f64,
    pub mass_kg: f64,
    #[serde(default)]
    pub label: String,
}

/// On-disk motor document. Only `rated_torque_nm` is required.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MotorFile {
    pub rated_torque_nm: f64,
    #[serde(default = "one")]
    pub safety_factor: f64,
    #[serde(default)]
    pub required_torque_nm: Option<f64>,
    #[serde(default)]
    pub worst_case_alpha_deg: Option<f64>,
    #[serde(default)]
    pub worst_case_fruit: Option<FruitFile>,
}

fn one() -> f64 {
    1.0
}

impl From<&MotorSpec> for MotorFile {
    fn from(m: &MotorSpec) -> Self {
        MotorFile {
            rated_torque_nm: m.rated_torque,
            safety_factor: m.safety_factor,
            required_torque_nm: m.required_torque,
            worst_case_alpha_deg: m.worst_case_alpha.map(f64::to_degrees),
            worst_case_fruit: m.worst_case_fruit.as_ref().map(|f| FruitFile {
                width_mm: f.width() * 1000.0,
                height_mm: f.height() * 1000.0,
                mass_kg: f.mass(),
                label: f.label().to_string(),
            }),
        }
    }
}

impl MotorFile {
    pub fn into_spec(self) -> Result<MotorSpec> {
        check_non_negative("rated_torque", self.rated_torque_nm)?;
        if !(self.safety_factor.is_finite() && self.safety_factor >= 1.0) {
            return Err(Error::domain("safety_factor", "must be >= 1"));
        }
        let worst_case_fruit = match self.worst_case_fruit {
            Some(f) => Some(
                cylinder_from_fruit(f.width_mm / 1000.0, f.height_mm / 1000.0, f.mass_kg)?
                    .with_label(f.label),
            ),
            None => None,
        };
        Ok(MotorSpec {
            rated_torque: self.rated_torque_nm,
            safety_factor: self.safety_factor,
            required_torque: self.required_torque_nm,
            worst_case_alpha: self.worst_case_alpha_deg.map(f64::to_radians),
            worst_case_fruit,
        })
    }

    pub fn from_json(text: &str) -> Result<MotorSpec> {
        let file: MotorFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: format!("motor: {e}"),
        })?;
        file.into_spec()
    }
}

//! Kinematics and force analysis of the five-finger internal-gear gripper.
//!
//! Points of the ABO triangle: `O` is the ring-gear center, `A` a pinion center,
//! `B` the center of the finger fixed to that pinion. `alpha` is the angle at `A`
//! between `AO` and `AB`, read directly from the motor encoder.
//!
//! The motor torque `τ_M` produces a tangential mesh force `F_t = τ_M / R` on every
//! pinion. Each pinion then carries `τ_1 = F_t · r`, which pushes its finger with
//! `F = τ_1 / l_AB`. The radial mesh force points at the pitch circle center and
//! produces no moment. Summed over `n` fingers, the grasp moment is
//! `n · F · cos θ · d`.

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search;

const ALPHA_SLACK: f64 = 1e-12;

/// Dimensions and actuation limits of the gripper, SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryParams {
    /// Pitch radius `R` of the internal ring gear [m].
    pub ring_radius: f64,
    /// Pitch radius `r` of each pinion [m].
    pub pinion_radius: f64,
    /// `l_AB`, pinion center to finger center [m].
    pub finger_offset: f64,
    /// `l_OA`, ring center to pinion center [m].
    pub center_distance: f64,
    pub finger_count: u32,
    pub finger_diameter: f64,
    /// Encoder angle limits [rad].
    pub alpha_min: f64,
    pub alpha_max: f64,
}

/// Validated gripper geometry.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GripperGeometry {
    p: GeometryParams,
}

impl GripperGeometry {
    pub fn new(p: GeometryParams) -> Result<Self> {
        let lengths = [
            ("ring_radius", p.ring_radius),
            ("pinion_radius", p.pinion_radius),
            ("finger_offset", p.finger_offset),
            ("center_distance", p.center_distance),
            ("finger_diameter", p.finger_diameter),
        ];
        for (field, v) in lengths {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::domain(
                    field,
                    format!("must be finite and > 0, got {v}"),
                ));
            }
        }
        if p.finger_count < 2 {
            return Err(Error::domain(
                "finger_count",
                format!("need at least 2, got {}", p.finger_count),
            ));
        }
        if p.pinion_radius >= p.ring_radius {
            return Err(Error::domain(
                "pinion_radius",
                "must be smaller than ring_radius",
            ));
        }
        if p.center_distance <= p.finger_offset {
            return Err(Error::domain(
                "center_distance",
                "must exceed finger_offset",
            ));
        }
        let alpha_ok = p.alpha_min.is_finite()
            && p.alpha_max.is_finite()
            && 0.0 < p.alpha_min
            && p.alpha_min <= p.alpha_max
            && p.alpha_max < PI;
        if !alpha_ok {
            return Err(Error::domain(
                "alpha_range",
                format!(
                    "need 0 < min <= max < pi, got [{}, {}]",
                    p.alpha_min, p.alpha_max
                ),
            ));
        }
        Ok(Self { p })
    }

    /// Reference geometry used throughout the worked examples:
    /// R = 50 mm, r = 10 mm, l_AB = 15 mm, l_OA = 40 mm, five 10 mm fingers, alpha in [13°, 110°].
    pub fn reference() -> Self {
        Self::new(GeometryParams {
            ring_radius: 0.05,
            pinion_radius: 0.01,
            finger_offset: 0.015,
            center_distance: 0.04,
            finger_count: 5,
            finger_diameter: 0.01,
            alpha_min: 13f64.to_radians(),
            alpha_max: 110f64.to_radians(),
        })
        .expect("reference geometry is valid")
    }

    /// A larger layout (R = 70 mm, r = 10 mm, l_AB = 35 mm, l_OA = 60 mm, 15 mm fingers)
    /// whose transmitting closure range spans every fruit width in the bundled grasp trials.
    pub fn harvest() -> Self {
        Self::new(GeometryParams {
            ring_radius: 0.07,
            pinion_radius: 0.01,
            finger_offset: 0.035,
            center_distance: 0.06,
            finger_count: 5,
            finger_diameter: 0.015,
            alpha_min: 13f64.to_radians(),
            alpha_max: 110f64.to_radians(),
        })
        .expect("harvest geometry is valid")
    }

    pub fn params(&self) -> &GeometryParams {
        &self.p
    }

    pub fn ring_radius(&self) -> f64 {
        self.p.ring_radius
    }

    pub fn pinion_radius(&self) -> f64 {
        self.p.pinion_radius
    }

    pub fn finger_offset(&self) -> f64 {
        self.p.finger_offset
    }

    pub fn center_distance(&self) -> f64 {
        self.p.center_distance
    }

    pub fn finger_count(&self) -> u32 {
        self.p.finger_count
    }

    pub fn finger_diameter(&self) -> f64 {
        self.p.finger_diameter
    }

    pub fn alpha_range(&self) -> (f64, f64) {
        (self.p.alpha_min, self.p.alpha_max)
    }

    pub fn check_alpha(&self, alpha: f64) -> Result<()> {
        let (lo, hi) = self.alpha_range();
        if alpha.is_finite() && alpha >= lo - ALPHA_SLACK && alpha <= hi + ALPHA_SLACK {
            Ok(())
        } else {
            Err(Error::AlphaOutOfRange {
                alpha_deg: alpha.to_degrees(),
                min_deg: lo.to_degrees(),
                max_deg: hi.to_degrees(),
            })
        }
    }

    /// Copy with a different actuation range.
    pub fn with_alpha_range(&self, alpha_min: f64, alpha_max: f64) -> Result<Self> {
        Self::new(GeometryParams {
            alpha_min,
            alpha_max,
            ..self.p
        })
    }

    /// Copy with a different finger diameter.
    pub fn with_finger_diameter(&self, finger_diameter: f64) -> Result<Self> {
        Self::new(GeometryParams {
            finger_diameter,
            ..self.p
        })
    }
}

/// On-disk geometry document. Lengths in millimetres, angles in degrees.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryFile {
    pub ring_radius_mm: f64,
    pub pinion_radius_mm: f64,
    pub finger_offset_mm: f64,
    pub center_distance_mm: f64,
    pub finger_count: u32,
    pub finger_diameter_mm: f64,
    pub alpha_min_deg: f64,
    pub alpha_max_deg: f64,
}

impl GeometryFile {
    pub fn into_geometry(self) -> Result<GripperGeometry> {
        GripperGeometry::new(GeometryParams {
            ring_radius: self.ring_radius_mm / 1000.0,
            pinion_radius: self.pinion_radius_mm / 1000.0,
            finger_offset: self.finger_offset_mm / 1000.0,
            center_distance: self.center_distance_mm / 1000.0,
            finger_count: self.finger_count,
            finger_diameter: self.finger_diameter_mm / 1000.0,
            alpha_min: self.alpha_min_deg.to_radians(),
            alpha_max: self.alpha_max_deg.to_radians(),
        })
    }

    pub fn from_json(text: &str) -> Result<GripperGeometry> {
        let file: GeometryFile = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line() as u64,
            message: format!("geometry: {e}"),
        })?;
        file.into_geometry()
    }
}

impl From<&GripperGeometry> for GeometryFile {
    fn from(g: &GripperGeometry) -> Self {
        let p = g.params();
        GeometryFile {
            ring_radius_mm: p.ring_radius * 1000.0,
            pinion_radius_mm: p.pinion_radius * 1000.0,
            finger_offset_mm: p.finger_offset * 1000.0,
            center_distance_mm: p.center_distance * 1000.0,
            finger_count: p.finger_count,
            finger_diameter_mm: p.finger_diameter * 1000.0,
            alpha_min_deg: p.alpha_min.to_degrees(),
            alpha_max_deg: p.alpha_max.to_degrees(),
        }
    }
}

/// Force chain from motor torque to a single finger.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FingerLoad {
    /// `F_t` on the pitch circle [N].
    pub tangent_force: f64,
    /// `τ_1` on each pinion [N·m].
    pub pinion_torque: f64,
    /// `F` at the finger center [N].
    pub finger_force: f64,
    /// Always true: the radial mesh component passes through the pitch center.
    pub radial_force_moment_free: bool,
}

pub fn finger_drive_force(geom: &GripperGeometry, motor_torque: f64) -> Result<FingerLoad> {
    if !(motor_torque.is_finite() && motor_torque >= 0.0) {
        return Err(Error::domain(
            "motor_torque",
            format!("must be finite and >= 0, got {motor_torque}"),
        ));
    }
    let tangent_force = motor_torque / geom.ring_radius();
    let pinion_torque = tangent_force * geom.pinion_radius();
    let finger_force = pinion_torque / geom.finger_offset();
    Ok(FingerLoad {
        tangent_force,
        pinion_torque,
        finger_force,
        radial_force_moment_free: true,
    })
}

/// Solved ABO triangle for one encoder angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FingerConfiguration {
    pub alpha: f64,
    /// |OB|, ring center to finger center [m].
    pub d: f64,
    pub angle_abo: f64,
    pub gamma: f64,
    /// Angle between the finger force and the tangent of the finger-center circle.
    pub theta: f64,
}

/// Solves the ABO triangle without range checks.
///
/// `∠ABO` comes from the law of cosines, which stays unambiguous when the
/// angle is obtuse.
pub fn solve_triangle(
    finger_offset: f64,
    center_distance: f64,
    alpha: f64,
) -> Result<FingerConfiguration> {
    let (l_ab, l_oa) = (finger_offset, center_distance);
    let d = (l_ab * l_ab + l_oa * l_oa - 2.0 * l_ab * l_oa * alpha.cos())
        .max(0.0)
        .sqrt();
    if d <= 1e-12 * (l_ab + l_oa) {
        return Err(Error::DegenerateConfiguration { d });
    }
    let cos_abo = ((l_ab * l_ab + d * d - l_oa * l_oa) / (2.0 * l_ab * d)).clamp(-1.0, 1.0);
    let angle_abo = cos_abo.acos();
    let gamma = angle_abo - FRAC_PI_2;
    let theta = FRAC_PI_2 - gamma;
    Ok(FingerConfiguration {
        alpha,
        d,
        angle_abo,
        gamma,
        theta,
    })
}

pub fn finger_configuration(geom: &GripperGeometry, alpha: f64) -> Result<FingerConfiguration> {
    geom.check_alpha(alpha)?;
    solve_triangle(geom.finger_offset(), geom.center_distance(), alpha)
}

/// `∠ABO` by the law of sines, `asin(l_OA sin α / d)`.
///
/// Only correct while `∠ABO` is acute; kept for cross-checking.
pub fn angle_abo_by_sines(geom: &GripperGeometry, alpha: f64) -> Result<f64> {
    let conf = finger_configuration(geom, alpha)?;
    Ok((geom.center_distance() * alpha.sin() / conf.d)
        .clamp(-1.0, 1.0)
        .asin())
}

/// Analytic `∂d/∂α = l_AB l_OA sin α / d`.
pub fn d_rate(geom: &GripperGeometry, alpha: f64) -> Result<f64> {
    let conf = finger_configuration(geom, alpha)?;
    Ok(geom.finger_offset() * geom.center_distance() * alpha.sin() / conf.d)
}

/// Closing moment contributed by each finger, `F cos θ d` [N·m]. Signed.
pub fn finger_moments(geom: &GripperGeometry, motor_torque: f64, alpha: f64) -> Result<Vec<f64>> {
    let load = finger_drive_force(geom, motor_torque)?;
    let conf = finger_configuration(geom, alpha)?;
    let per_finger = load.finger_force * conf.theta.cos() * conf.d;
    Ok(vec![per_finger; geom.finger_count() as usize])
}

/// Total grasp moment `n F cos θ d` [N·m].
///
/// Negative when θ exceeds 90°, i.e. the finger force opposes closing.
pub fn total_grasp_moment(geom: &GripperGeometry, motor_torque: f64, alpha: f64) -> Result<f64> {
    let load = finger_drive_force(geom, motor_torque)?;
    let conf = finger_configuration(geom, alpha)?;
    Ok(f64::from(geom.finger_count()) * load.finger_force * conf.theta.cos() * conf.d)
}

/// Opening between the fingers: `2 d − finger_diameter` [m].
pub fn aperture(geom: &GripperGeometry, alpha: f64) -> Result<f64> {
    let conf = finger_configuration(geom, alpha)?;
    Ok(2.0 * conf.d - geom.finger_diameter())
}

/// Achievable `(min, max)` aperture over the actuation range.
pub fn aperture_range(geom: &GripperGeometry) -> Result<(f64, f64)> {
    let (lo, hi) = geom.alpha_range();
    Ok((aperture(geom, lo)?, aperture(geom, hi)?))
}

/// Inverse of [`aperture`] by bisection; `aperture` is strictly increasing in α.
pub fn alpha_for_aperture(geom: &GripperGeometry, opening: f64) -> Result<f64> {
    let (min, max) = aperture_range(geom)?;
    if !(opening.is_finite() && opening >= min && opening <= max) {
        return Err(Error::UnreachableAperture { opening, min, max });
    }
    let (lo, hi) = geom.alpha_range();
    let alpha = search::bisect(
        |a| aperture(geom, a).expect("bisection stays inside alpha range") - opening,
        lo,
        hi,
        1e-12,
        1e-14,
        200,
    );
    Ok(alpha.clamp(lo, hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    /// Straight transcription of the force chain, written independently of the
    /// module functions: F_t, τ_1, F, d, asin/acos angle, γ, θ, moment.
    fn brute_force_moment(
        r_ring: f64,
        r_pin: f64,
        l_ab: f64,
        l_oa: f64,
        n: f64,
        tau_m: f64,
        alpha_deg: f64,
    ) -> f64 {
        let a = alpha_deg * PI / 180.0;
        let ft = tau_m / r_ring;
        let tau1 = ft * r_pin;
        let f = tau1 / l_ab;
        let d = (l_ab.powi(2) + l_oa.powi(2) - 2.0 * l_ab * l_oa * a.cos()).sqrt();
        // Place A at the origin with O on the +x axis; B at angle alpha from AO.
        let (ox, oy) = (l_oa, 0.0);
        let (bx, by) = (l_ab * a.cos(), l_ab * a.sin());
        let (bax, bay) = (-bx, -by);
        let (box_, boy) = (ox - bx, oy - by);
        let abo = ((bax * box_ + bay * boy) / (l_ab * d)).acos();
        let gamma = abo - PI / 2.0;
        let theta = PI / 2.0 - gamma;
        n * f * theta.cos() * d
    }

    #[test]
    fn drive_force_reference() {
        let g = GripperGeometry::reference();
        let load = finger_drive_force(&g, 1.0).unwrap();
        assert_relative_eq!(load.tangent_force, 20.0, max_relative = 1e-12);
        assert_relative_eq!(load.pinion_torque, 0.2, max_relative = 1e-12);
        assert_relative_eq!(load.finger_force, 13.333_333_333_333, max_relative = 1e-9);
        assert!(load.radial_force_moment_free);

        let zero = finger_drive_force(&g, 0.0).unwrap();
        assert_eq!(
            (zero.tangent_force, zero.pinion_torque, zero.finger_force),
            (0.0, 0.0, 0.0)
        );

        let two = finger_drive_force(&g, 2.0).unwrap();
        assert_relative_eq!(
            two.finger_force,
            2.0 * load.finger_force,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            two.tangent_force,
            2.0 * load.tangent_force,
            max_relative = 1e-15
        );
    }

    #[test]
    fn drive_force_rejects_negative_torque() {
        let g = GripperGeometry::reference();
        assert!(matches!(
            finger_drive_force(&g, -0.1),
            Err(Error::Domain {
                field: "motor_torque",
                ..
            })
        ));
    }

    #[test]
    fn configuration_at_sixty_degrees() {
        let g = GripperGeometry::reference();
        let c = finger_configuration(&g, 60f64.to_radians()).unwrap();
        assert_relative_eq!(c.d, 0.035, max_relative = 1e-12);
        assert!((c.angle_abo.to_degrees() - 98.213).abs() < 5e-4);
        assert!((c.theta.to_degrees() - 81.787).abs() < 5e-4);
        assert_eq!(c.theta, PI - c.angle_abo);
        // The law-of-sines form lands on the acute supplement here.
        let asin_form = angle_abo_by_sines(&g, 60f64.to_radians()).unwrap();
        assert!((asin_form.to_degrees() - 81.787).abs() < 5e-4);
    }

    #[test]
    fn configuration_rejects_out_of_range() {
        let g = GripperGeometry::reference();
        assert!(matches!(
            finger_configuration(&g, 150f64.to_radians()),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(finger_configuration(&g, 12f64.to_radians()).is_err());
    }

    #[test]
    fn coincident_points_are_degenerate() {
        assert!(matches!(
            solve_triangle(0.03, 0.03, 0.0),
            Err(Error::DegenerateConfiguration { .. })
        ));
        let near = solve_triangle(0.03, 0.03, 1e-4).unwrap();
        assert!(near.d < 1e-5);
    }

    #[test]
    fn geometry_invariants() {
        let base = *GripperGeometry::reference().params();
        let bad = [
            GeometryParams {
                finger_offset: 0.05,
                ..base
            },
            GeometryParams {
                pinion_radius: 0.06,
                ..base
            },
            GeometryParams {
                finger_count: 1,
                ..base
            },
            GeometryParams {
                alpha_max: 4.0,
                ..base
            },
            GeometryParams {
                alpha_min: 0.0,
                ..base
            },
            GeometryParams {
                finger_diameter: 0.0,
                ..base
            },
        ];
        for p in bad {
            assert!(GripperGeometry::new(p).is_err(), "{p:?}");
        }
    }

    #[test]
    fn moment_reference() {
        let g = GripperGeometry::reference();
        let a = 60f64.to_radians();
        let m = total_grasp_moment(&g, 1.0, a).unwrap();
        assert_relative_eq!(m, 1.0 / 3.0, max_relative = 1e-9);
        assert_relative_eq!(
            m,
            brute_force_moment(0.05, 0.01, 0.015, 0.04, 5.0, 1.0, 60.0),
            max_relative = 1e-12
        );
        assert_eq!(total_grasp_moment(&g, 0.0, a).unwrap(), 0.0);
        assert_relative_eq!(
            total_grasp_moment(&g, 3.0, a).unwrap(),
            1.0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn moment_turns_negative_past_right_angle() {
        let g = GripperGeometry::reference();
        // l_OA cos α < l_AB once α > acos(0.375) ≈ 67.98°.
        assert!(total_grasp_moment(&g, 1.0, 67f64.to_radians()).unwrap() > 0.0);
        assert!(total_grasp_moment(&g, 1.0, 69f64.to_radians()).unwrap() < 0.0);
    }

    #[test]
    fn moment_matches_simplified_lever() {
        // cos θ · d reduces to l_OA cos α − l_AB.
        let g = GripperGeometry::reference();
        for deg in (13..=110).step_by(7) {
            let a = f64::from(deg).to_radians();
            let f = finger_drive_force(&g, 1.0).unwrap().finger_force;
            let lever = g.center_distance() * a.cos() - g.finger_offset();
            let expected = 5.0 * f * lever;
            let got = total_grasp_moment(&g, 1.0, a).unwrap();
            assert!((got - expected).abs() < 1e-12, "{deg}: {got} vs {expected}");
        }
    }

    #[test]
    fn finger_sum_equals_total() {
        let g = GripperGeometry::reference();
        let a = 40f64.to_radians();
        let per: f64 = finger_moments(&g, 1.7, a).unwrap().iter().sum();
        assert_relative_eq!(
            per,
            total_grasp_moment(&g, 1.7, a).unwrap(),
            max_relative = 1e-14
        );
    }

    #[test]
    fn aperture_examples() {
        let g = GripperGeometry::reference();
        assert_relative_eq!(
            aperture(&g, 60f64.to_radians()).unwrap(),
            0.060,
            max_relative = 1e-12
        );
        assert!((aperture(&g, 110f64.to_radians()).unwrap() - 0.084_560_55).abs() < 1e-8);
        // Law-of-cosines oracle: d(13°) = 0.02560773 m.
        assert!((aperture(&g, 13f64.to_radians()).unwrap() - 0.041_215_46).abs() < 1e-8);
    }

    #[test]
    fn aperture_inverse_examples() {
        let g = GripperGeometry::reference();
        let a = alpha_for_aperture(&g, 0.060).unwrap();
        assert!((a.to_degrees() - 60.0).abs() < 1e-6);
        assert!((aperture(&g, a).unwrap() - 0.060).abs() < 1e-9);

        let lo = aperture(&g, 13f64.to_radians()).unwrap();
        let a = alpha_for_aperture(&g, lo).unwrap();
        assert!((a.to_degrees() - 13.0).abs() < 1e-9);

        match alpha_for_aperture(&g, 0.2) {
            Err(Error::UnreachableAperture { min, max, .. }) => {
                assert!((min - 0.041_215_46).abs() < 1e-8);
                assert!((max - 0.084560).abs() < 1e-6);
            }
            other => panic!("expected unreachable aperture, got {other:?}"),
        }
    }

    #[test]
    fn geometry_file_round_trip() {
        let g = GripperGeometry::reference();
        let text = serde_json::to_string(&GeometryFile::from(&g)).unwrap();
        let back = GeometryFile::from_json(&text).unwrap();
        assert_relative_eq!(back.ring_radius(), g.ring_radius(), max_relative = 1e-15);
        assert_relative_eq!(
            back.alpha_range().1,
            g.alpha_range().1,
            max_relative = 1e-15
        );
        assert!(GeometryFile::from_json("{\"ring_radius_mm\": 1}").is_err());
    }

    #[test]
    fn harvest_geometry_closes_on_every_trial_width() {
        let g = GripperGeometry::harvest();
        let (min, max) = aperture_range(&g).unwrap();
        assert!(min < 0.04123 && max > 0.06553);
        for w in [0.04123, 0.06553] {
            let a = alpha_for_aperture(&g, w).unwrap();
            assert!(total_grasp_moment(&g, 1.0, a).unwrap() > 0.0);
        }
    }
}

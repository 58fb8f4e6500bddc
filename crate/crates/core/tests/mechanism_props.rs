//! Property tests for the mechanism, sizing and fruit model.

use std::f64::consts::PI;

use avogrip_core::mechanism::{
    alpha_for_aperture, angle_abo_by_sines, aperture, d_rate, finger_configuration, finger_moments,
    total_grasp_moment, GeometryParams, GripperGeometry,
};
use avogrip_core::model::{cylinder_from_fruit, InertiaAxis};
use avogrip_core::sizing::{detach_time, required_motor_torque, suction_force};
use proptest::prelude::*;

fn geometry() -> impl Strategy<Value = GripperGeometry> {
    (
        0.02f64..0.1,
        0.1f64..0.95,
        0.02f64..0.2,
        0.05f64..0.9,
        2u32..=8,
        0.001f64..0.02,
        0.05f64..1.0,
        0.1f64..2.0,
    )
        .prop_map(|(l_oa, ab_frac, ring, pin_frac, n, fd, a_min, a_span)| {
            GripperGeometry::new(GeometryParams {
                ring_radius: ring,
                pinion_radius: ring * pin_frac,
                finger_offset: l_oa * ab_frac,
                center_distance: l_oa,
                finger_count: n,
                finger_diameter: fd,
                alpha_min: a_min,
                alpha_max: (a_min + a_span).min(3.0),
            })
            .unwrap()
        })
}

/// A geometry plus an alpha inside its actuation range.
fn geometry_and_alpha() -> impl Strategy<Value = (GripperGeometry, f64)> {
    (geometry(), 0.0f64..=1.0).prop_map(|(g, t)| {
        let (lo, hi) = g.alpha_range();
        (g, lo + t * (hi - lo))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn d_respects_triangle_bounds((g, alpha) in geometry_and_alpha()) {
        let c = finger_configuration(&g, alpha).unwrap();
        let (l_ab, l_oa) = (g.finger_offset(), g.center_distance());
        let slack = 1e-12 * (l_ab + l_oa);
        prop_assert!(c.d >= (l_oa - l_ab).abs() - slack);
        prop_assert!(c.d <= l_oa + l_ab + slack);
    }

    #[test]
    fn theta_is_supplement_of_abo((g, alpha) in geometry_and_alpha()) {
        let c = finger_configuration(&g, alpha).unwrap();
        prop_assert!((c.theta - (PI - c.angle_abo)).abs() <= 1e-12);
        prop_assert!((c.gamma - (c.angle_abo - PI / 2.0)).abs() <= 1e-12);
    }

    #[test]
    fn sines_and_cosines_agree_when_acute((g, t) in (geometry(), 0.0f64..=1.0)) {
        // ∠ABO is acute once l_OA cos α < l_AB; move the range past that point.
        let onset = (g.finger_offset() / g.center_distance()).acos();
        let lo = onset + 0.1;
        let hi = (onset + 1.5).min(PI - 0.05);
        let g = g.with_alpha_range(lo, hi).unwrap();
        let alpha = lo + t * (hi - lo);
        let c = finger_configuration(&g, alpha).unwrap();
        // Stay clear of 90°, where asin loses its conditioning.
        prop_assume!(c.angle_abo.cos() > 0.05);
        let by_sines = angle_abo_by_sines(&g, alpha).unwrap();
        prop_assert!((by_sines - c.angle_abo).abs() < 1e-9, "{} vs {}", by_sines, c.angle_abo);
    }

    #[test]
    fn d_rate_matches_central_difference((g, t) in (geometry(), 0.0f64..=1.0)) {
        let h = 1e-6;
        let (lo, hi) = g.alpha_range();
        let alpha = (lo + h) + t * ((hi - h) - (lo + h));
        let d = |a| finger_configuration(&g, a).unwrap().d;
        let fd = (d(alpha + h) - d(alpha - h)) / (2.0 * h);
        let analytic = d_rate(&g, alpha).unwrap();
        prop_assert!(((fd - analytic) / analytic).abs() < 1e-6, "{} vs {}", fd, analytic);
    }

    #[test]
    fn d_strictly_increasing((g, alpha) in geometry_and_alpha(), step in 1e-4f64..0.5) {
        let (_, hi) = g.alpha_range();
        prop_assume!(alpha + step <= hi);
        let a = finger_configuration(&g, alpha).unwrap().d;
        let b = finger_configuration(&g, alpha + step).unwrap().d;
        prop_assert!(b > a);
        prop_assert!(aperture(&g, alpha + step).unwrap() > aperture(&g, alpha).unwrap());
    }

    #[test]
    fn moment_linear_in_torque((g, alpha) in geometry_and_alpha(), tau in 0.01f64..10.0, k in 0.0f64..50.0) {
        let base = total_grasp_moment(&g, tau, alpha).unwrap();
        let scaled = total_grasp_moment(&g, k * tau, alpha).unwrap();
        let expected = k * base;
        prop_assert!((scaled - expected).abs() <= 1e-12 * expected.abs().max(f64::MIN_POSITIVE));
    }

    #[test]
    fn moment_equals_sum_of_fingers((g, alpha) in geometry_and_alpha(), tau in 0.0f64..10.0) {
        let total = total_grasp_moment(&g, tau, alpha).unwrap();
        let per: f64 = finger_moments(&g, tau, alpha).unwrap().iter().sum();
        prop_assert!((total - per).abs() <= 1e-12 * total.abs().max(1e-300));
    }

    #[test]
    fn aperture_round_trip((g, alpha) in geometry_and_alpha()) {
        let opening = aperture(&g, alpha).unwrap();
        let back = alpha_for_aperture(&g, opening).unwrap();
        prop_assert!((back - alpha).abs() < 1e-6, "{} vs {}", back, alpha);
        prop_assert!((aperture(&g, back).unwrap() - opening).abs() < 1e-9);
    }

    #[test]
    fn required_torque_is_right_inverse((g, alpha) in geometry_and_alpha(), target in 0.0f64..5.0) {
        if let Ok(tau) = required_motor_torque(&g, alpha, target) {
            let m = total_grasp_moment(&g, tau, alpha).unwrap();
            prop_assert!((m - target).abs() <= 1e-9 * target.max(1e-300));
        } else {
            prop_assert!(finger_configuration(&g, alpha).unwrap().theta.cos() <= 0.0);
        }
    }

    #[test]
    fn inertia_scaling(r in 0.005f64..0.1, h in 0.01f64..0.2, m in 0.01f64..2.0, k in 0.1f64..10.0, km in 0.1f64..10.0) {
        let base = cylinder_from_fruit(2.0 * r, h, m).unwrap();
        let grown = cylinder_from_fruit(2.0 * k * r, k * h, m).unwrap();
        let heavy = cylinder_from_fruit(2.0 * r, h, km * m).unwrap();
        for axis in [InertiaAxis::Longitudinal, InertiaAxis::Transverse] {
            let i0 = base.moment_of_inertia(axis);
            prop_assert!((grown.moment_of_inertia(axis) - k * k * i0).abs() <= 1e-12 * k * k * i0);
            prop_assert!((heavy.moment_of_inertia(axis) - km * i0).abs() <= 1e-12 * km * i0);
        }
        if h * h >= 3.0 * r * r {
            prop_assert!(base.moment_of_inertia(InertiaAxis::Transverse) >= base.moment_of_inertia(InertiaAxis::Longitudinal));
        }
    }

    #[test]
    fn suction_scaling(dp in 1.0f64..1e5, d in 1e-3f64..0.1, k in 0.1f64..10.0) {
        let atm = 2e5;
        let f = suction_force(atm - dp, d, atm).unwrap();
        let f_dp = suction_force(atm - (dp * k).min(atm), d, atm).unwrap();
        if dp * k < atm {
            prop_assert!((f_dp - k * f).abs() <= 1e-9 * k * f);
        }
        let f_d = suction_force(atm - dp, k * d, atm).unwrap();
        prop_assert!((f_d - k * k * f).abs() <= 1e-9 * k * k * f);
    }

    #[test]
    fn detach_time_linear(rot in 0.0f64..300.0, k in 0.0f64..1.2, speed in 0.01f64..5.0) {
        let t = detach_time(rot, speed).unwrap();
        let tk = detach_time(k * rot, speed).unwrap();
        prop_assert!((tk - k * t).abs() <= 1e-12 * (k * t).max(1e-300));
    }
}

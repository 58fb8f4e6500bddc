use avogrip_core::datasets::{
    bundled_detachment_records, bundled_grasp_trials, group_rotation_stats,
    load_detachment_records, load_grasp_trials, viewpoint_stats, write_detachment_records,
    write_grasp_trials, DetachmentRecord, GraspTrial, SizeGroup,
};
use avogrip_core::model::Viewpoint;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;

/// Values with two decimals, as in the tables.
fn hundredths(lo: u32, hi: u32) -> impl Strategy<Value = f64> {
    (lo..hi).prop_map(|c| f64::from(c) / 100.0)
}

fn records() -> impl Strategy<Value = Vec<DetachmentRecord>> {
    prop::collection::vec(
        (
            0usize..3,
            hundredths(1, 10_000),
            hundredths(100, 20_000),
            hundredths(100, 20_000),
        ),
        1..40,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (v, force, b, h))| DetachmentRecord {
                sample_no: i as u32 + 1,
                viewpoint: Viewpoint::ALL[v],
                force,
                width_mm: b,
                height_mm: h,
            })
            .collect()
    })
}

fn trials() -> impl Strategy<Value = Vec<GraspTrial>> {
    prop::collection::vec(
        (
            0usize..3,
            0usize..2,
            hundredths(100, 20_000),
            hundredths(100, 20_000),
            1u32..359,
        ),
        1..40,
    )
    .prop_map(|rows| {
        rows.into_iter()
            .enumerate()
            .map(|(i, (g, v, b, h, rot))| GraspTrial {
                sample_no: i as u32 + 1,
                group: SizeGroup::ALL[g],
                viewpoint: [Viewpoint::FV, Viewpoint::CV][v],
                width_mm: b,
                height_mm: h,
                rotation_deg: f64::from(rot),
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn detachment_round_trip(recs in records()) {
        let mut buf = Vec::new();
        write_detachment_records(&recs, &mut buf).unwrap();
        prop_assert_eq!(load_detachment_records(buf.as_slice()).unwrap(), recs);
    }

    #[test]
    fn trial_round_trip(ts in trials()) {
        let mut buf = Vec::new();
        write_grasp_trials(&ts, &mut buf).unwrap();
        prop_assert_eq!(load_grasp_trials(buf.as_slice()).unwrap(), ts);
    }

    #[test]
    fn viewpoint_stats_permutation_invariant(recs in records(), seed in any::<u64>()) {
        let mut shuffled = recs.clone();
        shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        let stats = viewpoint_stats(&recs);
        prop_assert_eq!(&viewpoint_stats(&shuffled), &stats);
        for s in &stats {
            prop_assert!(s.min_force <= s.mean_force && s.mean_force <= s.max_force);
        }
    }

    #[test]
    fn rotation_stats_permutation_invariant(ts in trials(), seed in any::<u64>()) {
        let mut shuffled = ts.clone();
        shuffled.shuffle(&mut rand::rngs::StdRng::seed_from_u64(seed));
        prop_assert_eq!(group_rotation_stats(&shuffled).unwrap(), group_rotation_stats(&ts).unwrap());
    }
}

#[test]
fn bundled_tables_are_lossless() {
    let recs = bundled_detachment_records(None).unwrap();
    let mut buf = Vec::new();
    write_detachment_records(&recs, &mut buf).unwrap();
    assert_eq!(load_detachment_records(buf.as_slice()).unwrap(), recs);

    let ts = bundled_grasp_trials(None).unwrap();
    let mut buf = Vec::new();
    write_grasp_trials(&ts, &mut buf).unwrap();
    assert_eq!(load_grasp_trials(buf.as_slice()).unwrap(), ts);
}

mod common;

use std::f64::consts::PI;

use billiard_blocks::curve::{
    close_table, congruence_distance, glue, perturb_block, BuildingBlock, Bump, CurvatureProfile, Vec2, Window,
};
use billiard_blocks::lazutkin::lazutkin_perimeter;
use billiard_blocks::Error;
use common::*;
use proptest::prelude::*;

/// Classical RK4 on `θ' = κ, x' = cos θ, y' = sin θ` with a fixed step.
fn rk4_endpoint(profile: &CurvatureProfile, steps: usize) -> (Vec2, f64) {
    let h = profile.length / steps as f64;
    let f = |s: f64, th: f64| (profile.kappa(s), th.cos(), th.sin());
    let (mut th, mut x, mut y) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..steps {
        let s = i as f64 * h;
        let k1 = f(s, th);
        let k2 = f(s + 0.5 * h, th + 0.5 * h * k1.0);
        let k3 = f(s + 0.5 * h, th + 0.5 * h * k2.0);
        let k4 = f(s + h, th + h * k3.0);
        th += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        x += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        y += h / 6.0 * (k1.2 + 2.0 * k2.2 + 2.0 * k3.2 + k4.2);
    }
    (Vec2::new(x, y), th)
}

#[test]
fn quarter_circle_closed_form() {
    let p = quarter().eval_geometry(PI / 2.0).unwrap();
    assert!((p.point - Vec2::new(1.0, 1.0)).norm() < 1e-14);
    assert!((p.tangent_angle - PI / 2.0).abs() < 1e-14);
    let o = quarter().eval_geometry(0.0).unwrap();
    assert_eq!((o.point, o.tangent_angle), (Vec2::zeros(), 0.0));
    assert!(matches!(quarter().eval_geometry(2.0), Err(Error::Domain(_))));
}

#[test]
fn rk4_oracle_on_bumped_block() {
    let b = bumped_quarter(&[(0.4, 0.25, 0.5)]);
    let (p, th) = rk4_endpoint(b.profile(), 1_000_000);
    let end = b.eval_geometry(b.length()).unwrap();
    assert!((end.point - p).norm() <= 1e-10, "{}", (end.point - p).norm());
    assert!((end.tangent_angle - th).abs() <= 1e-10);
}

#[test]
fn quarter_arcs_glue_to_half_circle() {
    let (profile, motion) = glue(&quarter(), &quarter()).unwrap();
    assert_eq!(profile.length, PI);
    assert!(profile.bumps.is_empty() && profile.base == 1.0);
    assert!((motion.rotation - PI / 2.0).abs() < 1e-15);
    assert!((motion.translation - Vec2::new(1.0, 1.0)).norm() < 1e-14);
}

#[test]
fn glue_is_associative_on_profiles() {
    let b1 = perturb_block(&quarter(), Window::new(0.1, 0.5, 1), 0.03).unwrap().block;
    let b2 = quarter();
    let b3 = perturb_block(&quarter(), Window::new(0.3, 0.7, 0), -0.02).unwrap().block;
    let left = glue(&b1, &b2).unwrap().0.concat(b3.profile()).unwrap();
    let right = b1.profile().concat(&glue(&b2, &b3).unwrap().0).unwrap();
    for j in 0..=3000 {
        let s = left.length * j as f64 / 3000.0;
        assert_eq!(left.kappa(s), right.kappa(s));
    }
    assert_eq!(left.length, b1.length() + b2.length() + b3.length());
}

#[test]
fn four_quarters_close_into_the_unit_circle() {
    let c = circle();
    assert!((c.length() - 2.0 * PI).abs() < 1e-15);
    assert!((c.point(c.length()) - c.point(0.0)).norm() < 1e-10);
}

#[test]
fn larger_arc_breaks_closure() {
    let big = BuildingBlock::arc(0.5, PI).unwrap();
    let err = close_table(&[quarter(), quarter(), quarter(), big]).unwrap_err();
    match err {
        Error::Closure { turning_defect, endpoint_gap } => {
            assert!(turning_defect.abs() < 1e-12);
            assert!(endpoint_gap > 0.1);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn perturbation_example() {
    let b = quarter();
    let p = perturb_block(&b, Window::new(0.3, 0.6, 3), 0.01).unwrap();
    assert!((p.block.turning() - PI / 2.0).abs() < 1e-12);
    assert!((p.block.chord() - 2f64.sqrt()).abs() < 1e-12);
    let before = lazutkin_perimeter(&b);
    let after = lazutkin_perimeter(&p.block);
    assert!((after - before).abs() > 1e-9, "{before} {after}");
}

#[test]
fn perturbed_blocks_close_in_any_order() {
    let out = default_outcome();
    let mut blocks = out.blocks.clone();
    blocks.reverse();
    blocks.swap(0, 2);
    assert!(close_table(&blocks).is_ok());
}

#[test]
fn congruence_under_start_shift_and_mirror() {
    let out = default_outcome();
    let a = &out.table_a;
    let mut rotated = out.blocks.clone();
    rotated.rotate_left(1);
    let shifted = close_table(&rotated).unwrap();
    assert!(congruence_distance(a, &shifted) <= 1e-10);
    // symmetric blocks in reverse order trace the mirror image
    let mut reversed = out.blocks.clone();
    reversed.reverse();
    let mirrored = close_table(&reversed).unwrap();
    assert!(congruence_distance(a, &mirrored) <= 1e-10);
    assert!(congruence_distance(&circle(), &circle()) <= 1e-10);
    assert!(congruence_distance(&circle(), &oval()) > 0.1);
}

#[test]
fn constructed_pair_is_far_from_congruent() {
    let out = default_outcome();
    assert!(congruence_distance(&out.table_a, &out.table_b) >= 1e-7);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn perturbation_keeps_turning_chord_and_symmetry(
        lo in 0.05f64..0.3,
        width in 0.15f64..0.45,
        lead in 0usize..4,
        delta in -0.05f64..0.05,
    ) {
        let b = quarter();
        let hi = (lo + width).min(PI / 4.0 - 0.01);
        let p = perturb_block(&b, Window::new(lo, hi, lead), delta).unwrap();
        let q = &p.block;
        prop_assert!((q.turning() - PI / 2.0).abs() < 1e-12);
        prop_assert!((q.chord() - b.chord()).abs() < 1e-12);
        // `a - s` is itself rounded, so the mirror defect is bounded by the
        // slope of the curvature times a few ulps of the block length
        let a = q.length();
        let samples: Vec<f64> = (0..=1024).map(|j| a * j as f64 / 1024.0).collect();
        let slope = samples.iter().map(|&s| q.profile().kappa_derivs(s).1.abs()).fold(1.0, f64::max);
        for &s in &samples {
            let defect = (q.profile().kappa(s) - q.profile().kappa(a - s)).abs();
            prop_assert!(defect <= 1e-15 * slope * a.max(1.0) * 4.0, "defect {defect:e} slope {slope}");
        }
        prop_assert!(p.sup_change >= delta.abs() - 1e-15);
    }

    #[test]
    fn geometry_matches_rk4(
        c in 0.2f64..0.6,
        h in 0.08f64..0.18,
        amp in -0.5f64..0.8,
    ) {
        let b = bumped_quarter(&[(c, h, amp)]);
        let (p, th) = rk4_endpoint(b.profile(), 100_000);
        let end = b.eval_geometry(b.length()).unwrap();
        prop_assert!((end.point - p).norm() <= 1e-10);
        prop_assert!((end.tangent_angle - th).abs() <= 1e-10);
    }

    #[test]
    fn tables_wrap_around(c in 0.2f64..0.6, h in 0.05f64..0.18, amp in -0.5f64..0.8) {
        let t = oval_with(&[(c, h, amp)]);
        prop_assert!((t.point(t.length()) - t.point(0.0)).norm() <= 1e-10);
        prop_assert!((t.theta(t.length()) - 2.0 * PI).abs() <= 1e-10);
    }
}

#[test]
fn bump_must_sit_inside_block() {
    assert!(CurvatureProfile::new(1.0, 1.0, vec![Bump::new(0.95, 0.1, 0.1)]).is_err());
    assert!(BuildingBlock::new(CurvatureProfile::new(1.0, 1.0, vec![Bump::new(0.3, 0.1, 0.1)]).unwrap()).is_err());
}

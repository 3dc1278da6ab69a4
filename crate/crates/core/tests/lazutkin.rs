mod common;

use std::f64::consts::PI;

use billiard_blocks::curve::{perturb_block, BuildingBlock, Window};
use billiard_blocks::dynamics::PhaseState;
use billiard_blocks::lazutkin::{
    build_chart, from_lazutkin, lazutkin_perimeter, profile_lazutkin_perimeter, to_lazutkin,
    verify_glancing_estimates, Y_CONSERVED,
};
use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn circle_chart_and_states() {
    let c = circle();
    let chart = build_chart(&c);
    assert!((chart.c_omega() - 1.0 / (2.0 * PI)).abs() < 1e-15);
    assert!((chart.x_of_s(PI) - 0.5).abs() < 1e-12);
    assert_eq!(chart.x_of_s(c.length()), 1.0);
    for phi in [0.1, 0.7, 2.0] {
        let st = to_lazutkin(&chart, &c, PhaseState::new(0.0, phi));
        assert!((st.y - (2.0 / PI) * (phi / 2.0).sin()).abs() < 1e-15);
    }
}

#[test]
fn joints_sit_at_cumulative_block_perimeters() {
    let out = default_outcome();
    let t = &out.table_a;
    let chart = build_chart(t);
    let mut acc = 0.0;
    for (b, &j) in t.blocks().iter().zip(t.joints()) {
        assert!((chart.x_of_s(j) - acc * chart.c_omega()).abs() <= 1e-11);
        acc += lazutkin_perimeter(b);
    }
    assert!((acc * chart.c_omega() - 1.0).abs() <= 1e-11);
}

#[test]
fn thousand_random_round_trips() {
    let t = oval_with(&[(0.35, 0.2, 0.6), (0.6, 0.1, -0.3)]);
    let chart = build_chart(&t);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let st = PhaseState::new(rng.random_range(0.0..t.length()), rng.random_range(0.01..3.1));
        let back = from_lazutkin(&chart, &t, to_lazutkin(&chart, &t, st));
        assert!((back.s - st.s).abs() <= 1e-11 && (back.phi - st.phi).abs() <= 1e-11);
    }
}

#[test]
fn chart_is_strictly_increasing() {
    let t = default_outcome().table_b.clone();
    let chart = build_chart(&t);
    let mut prev = -1.0;
    for j in 0..=20_000 {
        let x = chart.x_of_s(t.length() * j as f64 / 20_000.0);
        assert!(x > prev);
        prev = x;
    }
}

#[test]
fn perimeter_is_additive_and_scales() {
    let b1 = perturb_block(&quarter(), Window::new(0.1, 0.6, 1), 0.02).unwrap().block;
    let b2 = perturb_block(&quarter(), Window::new(0.3, 0.7, 2), -0.03).unwrap().block;
    let joined = b1.profile().concat(b2.profile()).unwrap();
    let sum = lazutkin_perimeter(&b1) + lazutkin_perimeter(&b2);
    assert!((profile_lazutkin_perimeter(&joined) - sum).abs() <= 1e-12);
    assert!((lazutkin_perimeter(&quarter()) - PI / 2.0).abs() <= 1e-13);
    let lambda = 2.5f64;
    let scaled = BuildingBlock::new(b1.profile().scaled(lambda)).unwrap();
    assert!((lazutkin_perimeter(&scaled) - lambda.cbrt() * lazutkin_perimeter(&b1)).abs() <= 1e-12);
}

#[test]
fn perimeter_moves_with_the_perturbation() {
    let q = quarter();
    let base = lazutkin_perimeter(&q);
    let w = Window::new(0.3, 0.6, 3);
    for delta in [0.01, -0.01] {
        let p = lazutkin_perimeter(&perturb_block(&q, w, delta).unwrap().block);
        assert!((p - base).abs() > 1e-9, "delta {delta}: {p} vs {base}");
    }
}

#[test]
fn sum_of_block_perimeters_is_order_free() {
    let out = default_outcome();
    let sum = |t: &billiard_blocks::curve::BilliardTable| t.blocks().iter().map(lazutkin_perimeter).sum::<f64>();
    assert!((sum(&out.table_a) - sum(&out.table_b)).abs() <= 1e-13);
}

fn ys() -> Vec<f64> {
    [20usize, 30, 45, 70, 100, 140, 200].iter().map(|&n| 1.0 / n as f64).collect()
}

#[test]
fn circle_glancing_closed_form() {
    let c = circle();
    let rep = verify_glancing_estimates(&c, &ys()).unwrap();
    assert_eq!(rep.e_y, f64::INFINITY);
    for r in &rep.rows {
        assert!(r.d_y <= Y_CONSERVED);
        // each bounce advances x by φ/π while y0 = (2/π) sin(φ/2)
        let phi = 2.0 * (r.y0 * PI / 2.0).asin();
        let exact = r.bounces as f64 * (phi - 2.0 * (phi / 2.0).sin()) / PI;
        assert!((r.d_x - exact).abs() <= 1e-10 + 1e-6 * exact, "{} vs {exact}", r.d_x);
    }
    assert!((rep.e_x + 2.0).abs() < 0.05, "{}", rep.e_x);
}

/// Kendall's tau between the sample order and the values.
fn kendall_tau(v: &[f64]) -> f64 {
    let n = v.len();
    let mut score = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            score += (v[j] - v[i]).signum();
        }
    }
    score / (n * (n - 1) / 2) as f64
}

#[test]
fn smooth_oval_decay_has_no_growth_trend() {
    let rep = verify_glancing_estimates(&oval(), &ys()).unwrap();
    let scaled: Vec<f64> = rep.rows.iter().map(|r| r.d_y * (r.bounces as f64).powi(3)).collect();
    // seven points: tau >= 0.62 would be significant at the 5% level
    assert!(kendall_tau(&scaled) < 0.62, "{scaled:?}");
    assert!(rep.e_y <= -2.7 && rep.e_x <= -1.8, "{} {}", rep.e_y, rep.e_x);
    let text = rep.to_delimited();
    assert!(text.starts_with("y0,N,D_y,D_x\n"));
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn glancing_range_is_enforced() {
    assert!(verify_glancing_estimates(&circle(), &[0.06]).is_err());
}

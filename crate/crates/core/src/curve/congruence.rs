//! Congruence test through curvature as a function of arclength.
//!
//! Two closed curves of equal length are congruent exactly when their
//! curvature functions agree up to a cyclic shift and, for a mirror image,
//! a reversal of the parameter.

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

use super::table::BilliardTable;

/// Samples per curve on the comparison grid.
pub const GRID: usize = 1 << 14;
/// Candidate shifts per orientation passed on to exact refinement.
const CANDIDATES: usize = 6;

/// Sup-norm curvature mismatch minimized over cyclic shift and orientation.
///
/// Tables of different length return `max(|Δℓ|, d)`, where `d` compares the
/// curvatures on the normalized parameter.
pub fn congruence_distance(t1: &BilliardTable, t2: &BilliardTable) -> f64 {
    let (l1, l2) = (t1.length(), t2.length());
    let k1 = samples(t1, false);
    let h = l1 / GRID as f64;
    let mut scored = Vec::new();
    for reversed in [false, true] {
        let k2 = samples(t2, reversed);
        for shift in candidate_shifts(&k1, &k2) {
            let tau = h * shift as f64;
            scored.push((sup_at(t1, t2, reversed, tau), reversed, tau));
        }
    }
    scored.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut best = scored[0].0;
    for &(d, reversed, tau) in scored.iter().take(2) {
        if d > 0.0 {
            best = best.min(refine(t1, t2, reversed, tau, d));
        }
    }
    let dl = (l1 - l2).abs();
    if dl > 1e-12 * l1.max(l2) {
        best.max(dl)
    } else {
        best
    }
}

fn samples(t: &BilliardTable, reversed: bool) -> Vec<f64> {
    let l = t.length();
    (0..GRID)
        .map(|i| {
            let s = l * i as f64 / GRID as f64;
            t.kappa(if reversed { l - s } else { s })
        })
        .collect()
}

/// Grid shifts `j` with the smallest `L²` mismatch between `k1[i]` and
/// `k2[i + j]`, found from the circular cross-correlation.
fn candidate_shifts(k1: &[f64], k2: &[f64]) -> Vec<usize> {
    let n = k1.len();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);
    let mut a: Vec<Complex<f64>> = k1.iter().map(|&x| Complex::new(x, 0.0)).collect();
    let mut b: Vec<Complex<f64>> = k2.iter().map(|&x| Complex::new(x, 0.0)).collect();
    fwd.process(&mut a);
    fwd.process(&mut b);
    let mut c: Vec<Complex<f64>> = a.iter().zip(&b).map(|(x, y)| x.conj() * y).collect();
    inv.process(&mut c);
    let mut order: Vec<usize> = (0..n).collect();
    // larger correlation means smaller L² distance (the norms are shift invariant)
    order.sort_by(|&i, &j| c[j].re.total_cmp(&c[i].re).then(i.cmp(&j)));
    order.truncate(CANDIDATES);
    order
}

/// Sup distance at a continuous shift `tau` (in units of the first table's
/// arclength), evaluated exactly on the grid.
fn sup_at(t1: &BilliardTable, t2: &BilliardTable, reversed: bool, tau: f64) -> f64 {
    let (l1, l2) = (t1.length(), t2.length());
    let ratio = l2 / l1;
    let mut worst = 0.0f64;
    for i in 0..GRID {
        let s = l1 * i as f64 / GRID as f64;
        let s2 = (s + tau) * ratio;
        let k2 = if reversed { t2.kappa(l2 - s2) } else { t2.kappa(s2) };
        worst = worst.max((t1.kappa(s) - k2).abs());
    }
    worst
}

fn refine(t1: &BilliardTable, t2: &BilliardTable, reversed: bool, center: f64, at_grid: f64) -> f64 {
    let h = t1.length() / GRID as f64;
    let f = |tau: f64| sup_at(t1, t2, reversed, tau);
    // golden-section search over one grid cell either side
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (center - h, center + h);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..40 {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        }
        if hi - lo < 1e-12 * t1.length() {
            break;
        }
    }
    at_grid.min(f1).min(f2)
}

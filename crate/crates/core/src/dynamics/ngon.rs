//! Maximal-perimeter inscribed n-gons.
//!
//! With the first vertex held fixed, the perimeter is maximized over the
//! remaining vertices by damped Newton steps; the Hessian is tridiagonal
//! and available in closed form. The first vertex is then moved along one
//! vertex spacing, where the derivative of the reduced perimeter is driven
//! to zero by Brent's method.

use super::orbit::Orbit;
use crate::curve::{BilliardTable, Vec2};
use crate::error::{Error, Result};
use crate::lazutkin::{build_chart, LazutkinChart};
use crate::numeric::roots;

/// Inner Newton iteration limit.
const MAX_NEWTON: usize = 200;
/// Samples of the first vertex across one spacing.
const OUTER_SAMPLES: usize = 8;

struct Vertex {
    p: Vec2,
    t: Vec2,
    n: Vec2,
    kappa: f64,
}

fn vertex(table: &BilliardTable, s: f64) -> Vertex {
    let (p, th) = table.point_theta(s);
    let (sn, cs) = th.sin_cos();
    Vertex { p, t: Vec2::new(cs, sn), n: Vec2::new(-sn, cs), kappa: table.kappa(s) }
}

fn perimeter(table: &BilliardTable, s: &[f64]) -> f64 {
    let n = s.len();
    let l = table.length();
    let pts: Vec<Vec2> = s.iter().map(|&x| table.point(x)).collect();
    let mut sum = 0.0;
    for i in 0..n {
        let q = if i + 1 < n { pts[i + 1] } else { table.point(s[0] + l) };
        sum += (q - pts[i]).norm();
    }
    sum
}

/// Reduced problem at fixed `s[0]`: returns the perimeter and `∂P/∂s_0`.
fn solve_inner(table: &BilliardTable, s: &mut [f64]) -> Result<(f64, f64)> {
    let n = s.len();
    let l = table.length();
    let tol = 1e-12 * l;
    let mut lambda = 0.0f64;
    let mut current = perimeter(table, s);
    for _ in 0..MAX_NEWTON {
        let verts: Vec<Vertex> = (0..=n).map(|i| vertex(table, if i < n { s[i] } else { s[0] + l })).collect();
        // chord i joins vertex i to vertex i + 1
        let mut u = Vec::with_capacity(n);
        let mut d = Vec::with_capacity(n);
        for i in 0..n {
            let c = verts[i + 1].p - verts[i].p;
            let len = c.norm();
            d.push(len);
            u.push(c / len);
        }
        if n == 1 {
            break;
        }
        // unknowns are vertices 1..n-1
        let m = n - 1;
        let mut grad = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for k in 0..m {
            let j = k + 1;
            let v = &verts[j];
            let (ui, uo) = (u[j - 1], u[j]);
            let (ti, to) = (ui.dot(&v.t), uo.dot(&v.t));
            grad[k] = ti - to;
            diag[k] = v.kappa * ui.dot(&v.n) + (1.0 - ti * ti) / d[j - 1] - v.kappa * uo.dot(&v.n)
                + (1.0 - to * to) / d[j];
            if k + 1 < m {
                let w = &verts[j + 1];
                off[k] = -(v.t.dot(&w.t) - to * uo.dot(&w.t)) / d[j];
            }
        }
        let gmax = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        let step = loop {
            match solve_tridiagonal(&diag, &off, &grad, lambda) {
                Some(step) => break step,
                None => lambda = if lambda == 0.0 { 1e-6 * (1.0 + gmax) } else { lambda * 10.0 },
            }
            if lambda > 1e12 {
                return Err(Error::NoConvergence("n-gon Hessian could not be regularized".into()));
            }
        };
        let mut t = 1.0;
        let mut accepted = false;
        let mut trial = s.to_vec();
        for _ in 0..40 {
            for k in 0..m {
                trial[k + 1] = s[k + 1] + t * step[k];
            }
            let ordered = trial.windows(2).all(|w| w[1] > w[0]) && trial[n - 1] < trial[0] + l;
            if ordered {
                let p = perimeter(table, &trial);
                if p >= current - 1e-15 * l {
                    s.copy_from_slice(&trial);
                    current = p;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        let moved = step.iter().fold(0.0f64, |a, x| a.max(x.abs())) * t;
        if !accepted {
            if gmax < 1e-10 {
                break;
            }
            lambda = if lambda == 0.0 { 1e-6 } else { lambda * 10.0 };
            continue;
        }
        lambda *= 0.1;
        if lambda < 1e-12 {
            lambda = 0.0;
        }
        if moved <= tol {
            break;
        }
    }
    let v0 = vertex(table, s[0]);
    let first = (table.point(s[1 % n] + if n == 1 { l } else { 0.0 }) - v0.p).normalize();
    let last = (table.point(s[0] + l) - table.point(s[n - 1])).normalize();
    Ok((current, last.dot(&v0.t) - first.dot(&v0.t)))
}

/// Solves `(-H + λ) x = g` for the tridiagonal `H` (diagonal `diag`,
/// off-diagonal `off`); `None` if the shifted matrix is not positive definite.
fn solve_tridiagonal(diag: &[f64], off: &[f64], rhs: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut x = vec![0.0; m];
    let mut prev_c = 0.0;
    let mut prev_x = 0.0;
    for k in 0..m {
        let sub = if k > 0 { -off[k - 1] } else { 0.0 };
        let piv = -diag[k] + lambda - sub * prev_c;
        if !(piv > 0.0) {
            return None;
        }
        let sup = if k + 1 < m { -off[k] } else { 0.0 };
        c[k] = sup / piv;
        x[k] = (rhs[k] - sub * prev_x) / piv;
        prev_c = c[k];
        prev_x = x[k];
    }
    for k in (0..m.saturating_sub(1)).rev() {
        x[k] -= c[k] * x[k + 1];
    }
    Some(x)
}

fn seed(chart: &LazutkinChart, s1: f64, n: usize) -> Vec<f64> {
    let x1 = chart.x_lifted(s1);
    (0..n).map(|j| if j == 0 { s1 } else { chart.s_lifted(x1 + j as f64 / n as f64) }).collect()
}

/// Maximal perimeter `n`-gon (winding number one) inscribed in `table`,
/// returned as a closed billiard orbit.
pub fn max_perimeter_ngon(table: &BilliardTable, n: usize) -> Result<Orbit> {
    max_perimeter_ngon_with(table, &build_chart(table), n)
}

/// As [`max_perimeter_ngon`] with a prebuilt chart.
pub fn max_perimeter_ngon_with(table: &BilliardTable, chart: &LazutkinChart, n: usize) -> Result<Orbit> {
    if n < 2 {
        return Err(Error::Domain(format!("n-gon needs n >= 2, got {n}")));
    }
    let spacing = chart.s_lifted(1.0 / n as f64);
    let mut samples = Vec::with_capacity(OUTER_SAMPLES + 1);
    for k in 0..=OUTER_SAMPLES {
        let s1 = spacing * k as f64 / OUTER_SAMPLES as f64;
        let mut s = seed(chart, s1, n);
        let (p, g) = solve_inner(table, &mut s)?;
        samples.push((s1, p, g, s));
    }
    let mut best = samples
        .iter()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .map(|x| (x.1, x.3.clone()))
        .expect("samples are nonempty");
    let gscale = samples.iter().fold(0.0f64, |a, x| a.max(x.2.abs()));
    if gscale > 1e-13 {
        for w in samples.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            if a.2 > 0.0 && b.2 <= 0.0 {
                let mut keep = a.3.clone();
                let mut f = |s1: f64| {
                    let mut s = seed(chart, s1, n);
                    match solve_inner(table, &mut s) {
                        Ok((p, g)) => {
                            if p > best.0 {
                                keep = s;
                                best = (p, keep.clone());
                            }
                            g
                        }
                        Err(_) => f64::NAN,
                    }
                };
                let _ = roots::brent_with(&mut f, a.0, a.2, b.0, b.2, 1e-13 * table.length(), 100);
            }
        }
    }
    let (_, s) = best;
    let orbit = Orbit::closed_polygon(table, &s, 0.0);
    Ok(orbit)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{close_table, BuildingBlock};
    use std::f64::consts::PI;

    fn circle() -> BilliardTable {
        close_table(&vec![BuildingBlock::arc(1.0, PI / 2.0).unwrap(); 4]).unwrap()
    }

    #[test]
    fn circle_polygons() {
        let c = circle();
        for n in [2usize, 3, 4, 8, 16, 32, 100] {
            let o = max_perimeter_ngon(&c, n).unwrap();
            let exact = 2.0 * n as f64 * (PI / n as f64).sin();
            assert!((o.perimeter - exact).abs() < 1e-10, "n={n}: {} vs {exact}", o.perimeter);
            assert!(o.reflection_residual < 1e-10);
        }
    }

    #[test]
    fn rejects_small_n() {
        assert!(max_perimeter_ngon(&circle(), 1).is_err());
    }
}

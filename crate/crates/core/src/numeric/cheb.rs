//! Chebyshev series on Chebyshev–Lobatto points.
//!
//! A series `c` represents `f(t) = Σ c[k] T_k(t)` on `t ∈ [-1, 1]`. Panels of
//! the geometry cache map their arclength interval onto this reference
//! interval.

use std::f64::consts::PI;
use std::sync::OnceLock;

/// Polynomial degree used for every panel.
pub const DEGREE: usize = 16;
pub const NODES: usize = DEGREE + 1;

struct Tables {
    nodes: [f64; NODES],
    // cos(j k π / N), row j, column k
    cos: [[f64; NODES]; NODES],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let n = DEGREE as f64;
        let mut nodes = [0.0; NODES];
        let mut cos = [[0.0; NODES]; NODES];
        for j in 0..NODES {
            nodes[j] = (j as f64 * PI / n).cos();
            for (k, c) in cos[j].iter_mut().enumerate() {
                *c = ((j * k) as f64 * PI / n).cos();
            }
        }
        Tables { nodes, cos }
    })
}

/// Lobatto nodes `cos(jπ/N)`, ordered from `+1` down to `-1`.
pub fn nodes() -> &'static [f64; NODES] {
    &tables().nodes
}

/// Chebyshev coefficients of the interpolant through `values` at [`nodes`].
pub fn coefficients(values: &[f64; NODES]) -> [f64; NODES] {
    let t = tables();
    let n = DEGREE as f64;
    let mut c = [0.0; NODES];
    for (k, ck) in c.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, (&v, row)) in values.iter().zip(&t.cos).enumerate() {
            let w = if j == 0 || j == DEGREE { 0.5 } else { 1.0 };
            acc += w * v * row[k];
        }
        *ck = 2.0 * acc / n;
    }
    c[0] *= 0.5;
    c[DEGREE] *= 0.5;
    c
}

/// Antiderivative series vanishing at `t = -1`, scaled by `half_width` so the
/// result integrates in the panel's own variable.
pub fn integrate(a: &[f64; NODES], half_width: f64) -> [f64; NODES + 1] {
    let get = |k: usize| if k < NODES { a[k] } else { 0.0 };
    let mut b = [0.0; NODES + 1];
    b[1] = get(0) - 0.5 * get(2);
    for (k, bk) in b.iter_mut().enumerate().skip(2) {
        *bk = (get(k - 1) - get(k + 1)) / (2.0 * k as f64);
    }
    let mut at_minus_one = 0.0;
    for (k, bk) in b.iter().enumerate().skip(1) {
        at_minus_one += if k % 2 == 0 { *bk } else { -*bk };
    }
    b[0] = -at_minus_one;
    for bk in b.iter_mut() {
        *bk *= half_width;
    }
    b
}

/// Clenshaw evaluation of `Σ c[k] T_k(t)`.
#[inline]
pub fn eval(c: &[f64], t: f64) -> f64 {
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    let two_t = 2.0 * t;
    for &ck in c.iter().skip(1).rev() {
        let b0 = ck + two_t * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    c[0] + t * b1 - b2
}

/// Size of the trailing coefficients, used as the resolution test.
pub fn tail(c: &[f64]) -> f64 {
    let n = c.len();
    c[n - 1].abs().max(c[n - 2].abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_polynomial_exactly() {
        let f = |t: f64| 3.0 * t.powi(5) - t * t + 0.25;
        let mut v = [0.0; NODES];
        for (j, &x) in nodes().iter().enumerate() {
            v[j] = f(x);
        }
        let c = coefficients(&v);
        for &t in &[-1.0, -0.3, 0.0, 0.77, 1.0] {
            assert!((eval(&c, t) - f(t)).abs() < 1e-14);
        }
        assert!(tail(&c) < 1e-14);
    }

    #[test]
    fn integral_of_exponential() {
        let mut v = [0.0; NODES];
        for (j, &x) in nodes().iter().enumerate() {
            v[j] = x.exp();
        }
        let c = coefficients(&v);
        let ic = integrate(&c, 1.0);
        for &t in &[-1.0f64, -0.5, 0.1, 1.0] {
            let exact = t.exp() - (-1.0f64).exp();
            assert!((eval(&ic, t) - exact).abs() < 1e-15, "t={t}");
        }
        // half-width scaling
        let ic2 = integrate(&c, 0.5);
        assert!((eval(&ic2, 1.0) - 0.5 * (1f64.exp() - (-1f64).exp())).abs() < 1e-15);
    }
}

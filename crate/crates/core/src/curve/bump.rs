use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::numeric::quad;

/// Peak-normalized compactly supported bump `exp(1 - 1/(1 - u²))`, `|u| < 1`.
#[inline]
pub fn shape(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `(f, f', f'')` of [`shape`] at `u`.
#[inline]
pub fn shape_derivs(u: f64) -> (f64, f64, f64) {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        return (0.0, 0.0, 0.0);
    }
    let f = (1.0 - 1.0 / q).exp();
    let q2 = q * q;
    let d1 = -2.0 * u / q2;
    let d2 = 4.0 * u * u / (q2 * q2) - 2.0 / q2 - 8.0 * u * u / (q2 * q);
    (f, f * d1, f * d2)
}

/// `∫_{-1}^{1} shape(u) du`.
pub fn shape_integral() -> f64 {
    static I: OnceLock<f64> = OnceLock::new();
    *I.get_or_init(|| quad::integrate(shape, -1.0, 1.0, &[], 1e-16))
}

/// `∫_{-1}^{1} shape(u)² du`.
pub fn shape_square_integral() -> f64 {
    static I: OnceLock<f64> = OnceLock::new();
    *I.get_or_init(|| quad::integrate(|u| shape(u).powi(2), -1.0, 1.0, &[], 1e-16))
}

/// A smooth curvature bump `amplitude · shape((s - center) / halfwidth)`.
///
/// `amplitude` is the peak curvature change.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub center: f64,
    pub halfwidth: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn new(center: f64, halfwidth: f64, amplitude: f64) -> Self {
        Self { center, halfwidth, amplitude }
    }

    #[inline]
    pub fn lo(&self) -> f64 {
        self.center - self.halfwidth
    }

    #[inline]
    pub fn hi(&self) -> f64 {
        self.center + self.halfwidth
    }

    #[inline]
    pub fn contains(&self, s: f64) -> bool {
        (s - self.center).abs() < self.halfwidth
    }

    #[inline]
    pub fn value(&self, s: f64) -> f64 {
        let u = (s - self.center) / self.halfwidth;
        if u.abs() >= 1.0 {
            0.0
        } else {
            self.amplitude * shape(u)
        }
    }

    /// Value, first and second arclength derivative.
    #[inline]
    pub fn derivs(&self, s: f64) -> (f64, f64, f64) {
        let u = (s - self.center) / self.halfwidth;
        if u.abs() >= 1.0 {
            return (0.0, 0.0, 0.0);
        }
        let (f, f1, f2) = shape_derivs(u);
        let h = self.halfwidth;
        (self.amplitude * f, self.amplitude * f1 / h, self.amplitude * f2 / (h * h))
    }

    /// Turning contributed by this bump, `∫ value ds`.
    pub fn turning(&self) -> f64 {
        self.amplitude * self.halfwidth * shape_integral()
    }

    pub fn shifted(&self, ds: f64) -> Self {
        Self { center: self.center + ds, ..*self }
    }

    /// Mirror image under `s ↦ length - s`.
    pub fn mirrored(&self, length: f64) -> Self {
        Self { center: length - self.center, ..*self }
    }
}

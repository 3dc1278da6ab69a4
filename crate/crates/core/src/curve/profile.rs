use serde::{Deserialize, Serialize};

use super::bump::Bump;
use crate::error::{Error, Result};

/// Curvature as a function of arclength: a positive base value plus smooth
/// compactly supported bumps on `[0, length]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvatureProfile {
    pub base: f64,
    pub length: f64,
    pub bumps: Vec<Bump>,
}

impl CurvatureProfile {
    pub fn new(base: f64, length: f64, bumps: Vec<Bump>) -> Result<Self> {
        if !(base > 0.0 && base.is_finite()) {
            return Err(Error::Domain(format!("base curvature must be positive, got {base}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("length must be positive, got {length}")));
        }
        for b in &bumps {
            if !(b.halfwidth > 0.0) || !b.amplitude.is_finite() {
                return Err(Error::Domain(format!("malformed bump {b:?}")));
            }
            if b.lo() <= 0.0 || b.hi() >= length {
                return Err(Error::Domain(format!(
                    "bump support [{}, {}] not strictly inside (0, {length})",
                    b.lo(),
                    b.hi()
                )));
            }
        }
        Ok(Self { base, length, bumps })
    }

    /// A constant-curvature arc.
    pub fn arc(base: f64, length: f64) -> Result<Self> {
        Self::new(base, length, Vec::new())
    }

    #[inline]
    pub fn kappa(&self, s: f64) -> f64 {
        self.base + self.bumps.iter().map(|b| b.value(s)).sum::<f64>()
    }

    /// `(κ, κ', κ'')` in closed form.
    pub fn kappa_derivs(&self, s: f64) -> (f64, f64, f64) {
        let mut k = (self.base, 0.0, 0.0);
        for b in &self.bumps {
            if b.contains(s) {
                let (v, d1, d2) = b.derivs(s);
                k.0 += v;
                k.1 += d1;
                k.2 += d2;
            }
        }
        k
    }

    /// Radius of curvature `ρ = 1/κ`.
    #[inline]
    pub fn rho(&self, s: f64) -> f64 {
        1.0 / self.kappa(s)
    }

    /// `dρ/ds = -κ'/κ²`.
    pub fn rho_dot(&self, s: f64) -> f64 {
        let (k, k1, _) = self.kappa_derivs(s);
        -k1 / (k * k)
    }

    /// Total turning `∫ κ ds`, exact given the bump integral.
    pub fn turning(&self) -> f64 {
        self.base * self.length + self.bumps.iter().map(Bump::turning).sum::<f64>()
    }

    /// Sorted support endpoints of all bumps; curvature is analytic between them.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.bumps.iter().flat_map(|b| [b.lo(), b.center, b.hi()]).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Minimum curvature, sampled densely inside every bump support.
    pub fn min_kappa(&self) -> f64 {
        let mut m = self.base;
        for b in &self.bumps {
            let steps = 64;
            for j in 0..=steps {
                let s = b.lo() + 2.0 * b.halfwidth * j as f64 / steps as f64;
                m = m.min(self.kappa(s));
            }
        }
        m
    }

    pub fn max_kappa(&self) -> f64 {
        let mut m = self.base;
        for b in &self.bumps {
            let steps = 64;
            for j in 0..=steps {
                let s = b.lo() + 2.0 * b.halfwidth * j as f64 / steps as f64;
                m = m.max(self.kappa(s));
            }
        }
        m
    }

    /// Concatenation: `other` is placed after `self` in arclength.
    pub fn concat(&self, other: &CurvatureProfile) -> Result<CurvatureProfile> {
        if self.base != other.base {
            return Err(Error::Domain(format!(
                "cannot concatenate profiles with different base curvature ({} vs {}); curvature would jump at the joint",
                self.base, other.base
            )));
        }
        let mut bumps = self.bumps.clone();
        bumps.extend(other.bumps.iter().map(|b| b.shifted(self.length)));
        Ok(CurvatureProfile { base: self.base, length: self.length + other.length, bumps })
    }

    /// Uniform rescaling of the curve by `lambda` (lengths × λ, curvature / λ).
    pub fn scaled(&self, lambda: f64) -> CurvatureProfile {
        CurvatureProfile {
            base: self.base / lambda,
            length: self.length * lambda,
            bumps: self
                .bumps
                .iter()
                .map(|b| Bump::new(b.center * lambda, b.halfwidth * lambda, b.amplitude / lambda))
                .collect(),
        }
    }
}

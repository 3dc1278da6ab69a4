//! Local, closure-preserving perturbations of a building block.
//!
//! Four bumps are placed in a window `[lo, hi]` of the left half and mirrored
//! into the right half. One of them (the lead bump) carries the free
//! amplitude `delta · base`; the other three are solved so that across the
//! window the tangent turns by the same total angle and the end point is
//! displaced by exactly zero. The curve outside the window is then left
//! untouched, so turning, chord, every bounce outside the window and the
//! block's rigid motion all survive.

use serde::{Deserialize, Serialize};

use super::block::{BuildingBlock, KAPPA_FLOOR_FRACTION};
use super::bump::Bump;
use super::geometry::{Geometry, Vec2};
use super::profile::CurvatureProfile;
use crate::error::{Error, Result};

/// Number of mirrored bump pairs in one perturbation.
pub const PAIRS: usize = 4;
/// Newton iteration limit of the constraint solve.
pub const MAX_SOLVE_ITERATIONS: usize = 50;
/// Bump halfwidth as a fraction of the slot each bump occupies.
const SLOT_FILL: f64 = 0.45;

/// Placement of a perturbation: the window in the left half and which of
/// the four slots carries the free amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub lead: usize,
}

impl Window {
    pub fn new(lo: f64, hi: f64, lead: usize) -> Self {
        Self { lo, hi, lead }
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    fn slot(&self, j: usize) -> (f64, f64) {
        let step = self.width() / PAIRS as f64;
        (self.lo + step * (j as f64 + 0.5), SLOT_FILL * step)
    }

    /// Bumps of the left half for the given amplitudes.
    pub fn bumps(&self, amplitudes: &[f64; PAIRS]) -> [Bump; PAIRS] {
        std::array::from_fn(|j| {
            let (c, h) = self.slot(j);
            Bump::new(c, h, amplitudes[j])
        })
    }
}

/// Result of [`perturb_block`].
#[derive(Debug, Clone)]
pub struct Perturbed {
    pub block: BuildingBlock,
    /// Left-half amplitudes in slot order.
    pub amplitudes: [f64; PAIRS],
    /// Largest curvature change, `max |A_j|` (the bumps are disjoint).
    pub sup_change: f64,
}

/// Adds a closure-preserving symmetric perturbation to `block`.
///
/// The lead amplitude is `delta · base`; the remaining three are solved by
/// Newton's method on the window geometry.
pub fn perturb_block(block: &BuildingBlock, window: Window, delta: f64) -> Result<Perturbed> {
    let a = block.length();
    if !(window.lo > 0.0 && window.lo < window.hi && window.hi < 0.5 * a) {
        return Err(Error::Domain(format!(
            "perturbation window [{}, {}] not strictly inside (0, {})",
            window.lo,
            window.hi,
            0.5 * a
        )));
    }
    if window.lead >= PAIRS {
        return Err(Error::Domain(format!("lead slot {} out of range", window.lead)));
    }
    if delta == 0.0 {
        return Ok(Perturbed { block: block.clone(), amplitudes: [0.0; PAIRS], sup_change: 0.0 });
    }
    if !delta.is_finite() {
        return Err(Error::Domain(format!("non-finite delta {delta}")));
    }

    let base_profile = block.profile();
    let lead = delta * base_profile.base;
    let target = Geometry::on_range(base_profile, window.lo, window.hi).end_point();
    let others: Vec<usize> = (0..PAIRS).filter(|&j| j != window.lead).collect();

    // Equal halfwidths make the turning constraint `Σ A_j = 0`; the two
    // remaining coordinates move along directions that keep that sum.
    let amplitudes_of = |u: f64, v: f64| {
        let mut amp = [0.0; PAIRS];
        amp[window.lead] = lead;
        amp[others[0]] = -lead / 3.0 + u;
        amp[others[1]] = -lead / 3.0 - u + v;
        amp[others[2]] = -lead / 3.0 - v;
        amp
    };
    let window_profile = |amp: &[f64; PAIRS]| {
        let mut p = base_profile.clone();
        p.bumps.extend(window.bumps(amp));
        p
    };
    // the lead bump alone already fixes the local minimum of the curvature
    let mut lead_only = [0.0; PAIRS];
    lead_only[window.lead] = lead;
    let min_kappa = window_profile(&lead_only).min_kappa();
    let floor = KAPPA_FLOOR_FRACTION * base_profile.base;
    if min_kappa <= floor {
        return Err(Error::Convexity { min_kappa, floor });
    }
    let residual = |u: f64, v: f64| -> Vec2 {
        let p = window_profile(&amplitudes_of(u, v));
        Geometry::on_range(&p, window.lo, window.hi).end_point() - target
    };

    let scale = window.width();
    let tol = 1e-14 * scale.max(1e-300);
    let step = 1e-4 * base_profile.base;
    let (mut u, mut v) = (0.0, 0.0);
    let mut r = residual(u, v);
    let mut converged = false;
    for _ in 0..MAX_SOLVE_ITERATIONS {
        if r.norm() <= tol {
            converged = true;
            break;
        }
        let ru = (residual(u + step, v) - r) / step;
        let rv = (residual(u, v + step) - r) / step;
        let det = ru.x * rv.y - rv.x * ru.y;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let du = -(r.x * rv.y - rv.x * r.y) / det;
        let dv = -(ru.x * r.y - r.x * ru.y) / det;
        let (mut t, prev) = (1.0, r.norm());
        loop {
            let trial = residual(u + t * du, v + t * dv);
            if trial.norm() < prev || t < 1e-3 {
                u += t * du;
                v += t * dv;
                r = trial;
                break;
            }
            t *= 0.5;
        }
        if (du.abs() + dv.abs()) * t <= 1e-15 * lead.abs() && r.norm() <= 1e3 * tol {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::ConstraintSolve { iterations: MAX_SOLVE_ITERATIONS, residual: r.norm() });
    }

    let amplitudes = amplitudes_of(u, v);
    let mut bumps = base_profile.bumps.clone();
    for b in window.bumps(&amplitudes) {
        bumps.push(b);
        bumps.push(b.mirrored(a));
    }
    bumps.sort_by(|x, y| x.center.total_cmp(&y.center));
    let profile = CurvatureProfile::new(base_profile.base, a, bumps)?;
    let perturbed = BuildingBlock::new(profile)?;
    let sup_change = amplitudes.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    Ok(Perturbed { block: perturbed, amplitudes, sup_change })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quarter() -> BuildingBlock {
        BuildingBlock::arc(1.0, PI / 2.0).unwrap()
    }

    #[test]
    fn zero_delta_is_identity() {
        let b = quarter();
        let p = perturb_block(&b, Window::new(0.3, 0.6, 3), 0.0).unwrap();
        assert_eq!(p.block, b);
        assert_eq!(p.amplitudes, [0.0; PAIRS]);
    }

    #[test]
    fn preserves_turning_chord_and_motion() {
        let b = quarter();
        let p = perturb_block(&b, Window::new(0.3, 0.6, 3), 0.01).unwrap();
        let q = &p.block;
        assert!((q.turning() - PI / 2.0).abs() < 1e-12);
        assert!((q.chord() - 2f64.sqrt()).abs() < 1e-12);
        assert!((q.end_motion().translation - b.end_motion().translation).norm() < 1e-12);
        // untouched outside the window
        for &s in &[0.1, 0.65, 0.78, 0.9, 1.35, 1.5] {
            assert!((q.geometry().point(s) - b.geometry().point(s)).norm() < 1e-13, "s={s}");
        }
        assert!((p.amplitudes.iter().sum::<f64>()).abs() < 1e-16);
        assert!(p.sup_change >= 0.01);
    }

    #[test]
    fn mirrored_exactly() {
        let p = perturb_block(&quarter(), Window::new(0.2, 0.7, 1), -0.02).unwrap();
        let prof = p.block.profile();
        let a = prof.length;
        for j in 0..=10_000 {
            let s = a * j as f64 / 10_000.0;
            assert!((prof.kappa(s) - prof.kappa(a - s)).abs() <= 1e-15);
        }
    }

    #[test]
    fn window_must_sit_in_left_half() {
        assert!(perturb_block(&quarter(), Window::new(0.3, 0.9, 0), 0.01).is_err());
        assert!(perturb_block(&quarter(), Window::new(0.0, 0.5, 0), 0.01).is_err());
    }

    #[test]
    fn convexity_floor() {
        let err = perturb_block(&quarter(), Window::new(0.3, 0.6, 3), -0.95).unwrap_err();
        assert!(matches!(err, Error::Convexity { .. }), "{err:?}");
    }
}

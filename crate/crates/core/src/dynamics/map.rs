use serde::{Deserialize, Serialize};

use crate::curve::{BilliardTable, BuildingBlock, Vec2};
use crate::error::{Error, Result};
use crate::numeric::roots;

/// Position on the boundary and the angle of the outgoing chord measured
/// from the tangent, `0 < phi < π`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub s: f64,
    pub phi: f64,
}

impl PhaseState {
    pub fn new(s: f64, phi: f64) -> Self {
        Self { s, phi }
    }
}

/// A positively oriented convex curve the ball can bounce on.
pub trait Boundary {
    fn length(&self) -> f64;
    /// Closed boundaries accept any (lifted) arclength; open ones only `[0, length]`.
    fn is_closed(&self) -> bool;
    /// Point and tangent angle. On closed curves the angle is lifted.
    fn point_theta(&self, s: f64) -> (Vec2, f64);
    fn kappa(&self, s: f64) -> f64;

    fn point(&self, s: f64) -> Vec2 {
        self.point_theta(s).0
    }
}

impl Boundary for BilliardTable {
    fn length(&self) -> f64 {
        BilliardTable::length(self)
    }

    fn is_closed(&self) -> bool {
        true
    }

    fn point_theta(&self, s: f64) -> (Vec2, f64) {
        BilliardTable::point_theta(self, s)
    }

    fn kappa(&self, s: f64) -> f64 {
        BilliardTable::kappa(self, s)
    }

    fn point(&self, s: f64) -> Vec2 {
        BilliardTable::point(self, s)
    }
}

impl Boundary for BuildingBlock {
    fn length(&self) -> f64 {
        BuildingBlock::length(self)
    }

    fn is_closed(&self) -> bool {
        false
    }

    fn point_theta(&self, s: f64) -> (Vec2, f64) {
        self.geometry().point_theta(s)
    }

    fn kappa(&self, s: f64) -> f64 {
        self.profile().kappa(s)
    }

    fn point(&self, s: f64) -> Vec2 {
        self.geometry().point(s)
    }
}

/// One step of the billiard map with the arclength left unwrapped:
/// `Some((s', phi'))` with `s < s' < s + ℓ`, or `None` when an open curve
/// is left through its far end.
pub(crate) fn advance<B: Boundary + ?Sized>(curve: &B, s: f64, phi: f64) -> Option<(f64, f64)> {
    let l = curve.length();
    let (p0, th0) = curve.point_theta(s);
    let alpha = th0 + phi;
    let (dy, dx) = alpha.sin_cos();
    // negative just after s, positive past the forward intersection
    let f = |sigma: f64| {
        let q = curve.point(sigma) - p0;
        dx * q.y - dy * q.x
    };
    let limit = if curve.is_closed() { s + l * (1.0 - 1e-12) } else { l };
    if limit <= s + 1e-12 * l {
        return None;
    }
    let guess = (2.0 * phi / curve.kappa(s)).clamp(1e-12 * l, l);

    let mut hi = (s + 1.25 * guess).min(limit);
    let mut fhi = f(hi);
    while fhi < 0.0 {
        if hi >= limit {
            if curve.is_closed() {
                return Some(fallback(curve, s, alpha, &f, l));
            }
            // landing on the far end itself, up to rounding, still counts
            if fhi > -1e-15 * l {
                return Some((l, curve.point_theta(l).1 - alpha));
            }
            return None;
        }
        hi = (s + 2.0 * (hi - s)).min(limit);
        fhi = f(hi);
    }
    let mut lo = s + 0.75 * (hi - s).min(guess);
    let mut flo = f(lo);
    let mut shrink = 0;
    while flo >= 0.0 && shrink < 200 {
        lo = s + 0.5 * (lo - s);
        flo = f(lo);
        shrink += 1;
    }
    if flo >= 0.0 {
        lo = s;
        flo = -f64::MIN_POSITIVE;
    }
    let mut f_mut = f;
    let mut root = roots::brent_with(&mut f_mut, lo, flo, hi, fhi, 1e-13 * l, 200)?;
    // one Newton polish with the exact derivative sin(θ(σ) - α)
    let (_, th) = curve.point_theta(root);
    let slope = (th - alpha).sin();
    if slope > 0.0 {
        let polished = root - f(root) / slope;
        if polished > lo && polished <= hi {
            root = polished;
        }
    }
    if !curve.is_closed() && root > l {
        return None;
    }
    let th1 = curve.point_theta(root).1;
    Some((root, th1 - alpha))
}

/// Dense scan for the forward intersection, used only if bracketing fails.
fn fallback<B: Boundary + ?Sized, F: Fn(f64) -> f64>(curve: &B, s: f64, alpha: f64, f: &F, l: f64) -> (f64, f64) {
    let steps = 4096;
    let mut prev = s;
    let mut root = s + 0.5 * l;
    for j in 1..steps {
        let x = s + l * j as f64 / steps as f64;
        if f(x) >= 0.0 {
            root = roots::brent(f, prev, x, 1e-14 * l, 200).unwrap_or(x);
            break;
        }
        prev = x;
    }
    (root, curve.point_theta(root).1 - alpha)
}

/// The billiard map. On tables the returned arclength is reduced into
/// `[0, ℓ_0)`; on blocks leaving through the far end gives
/// [`Error::EscapedWall`].
pub fn next_bounce<B: Boundary + ?Sized>(curve: &B, state: PhaseState) -> Result<PhaseState> {
    if !(state.phi > 0.0 && state.phi < std::f64::consts::PI) {
        return Err(Error::Domain(format!("angle {} outside (0, π)", state.phi)));
    }
    let l = curve.length();
    if !curve.is_closed() && !(state.s >= 0.0 && state.s <= l) {
        return Err(Error::Domain(format!("arclength {} outside [0, {l}]", state.s)));
    }
    match advance(curve, state.s, state.phi) {
        Some((s, phi)) => {
            let s = if curve.is_closed() { s.rem_euclid(l) } else { s };
            Ok(PhaseState { s, phi })
        }
        None => Err(Error::EscapedWall { exit_s: state.s, exit_angle: state.phi }),
    }
}

/// Difference of the angles the incoming and outgoing chords make with
/// the tangent at the middle point.
pub fn reflection_residual<B: Boundary + ?Sized>(curve: &B, prev: f64, at: f64, next: f64) -> f64 {
    let (p, th) = curve.point_theta(at);
    let t = Vec2::new(th.cos(), th.sin());
    let incoming = (p - curve.point(prev)).normalize();
    let outgoing = (curve.point(next) - p).normalize();
    let angle_in = cross(t, incoming).atan2(t.dot(&incoming)).abs();
    let angle_out = cross(t, outgoing).atan2(t.dot(&outgoing)).abs();
    (angle_in - angle_out).abs()
}

#[inline]
pub(crate) fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::close_table;
    use std::f64::consts::PI;

    fn circle() -> BilliardTable {
        close_table(&vec![BuildingBlock::arc(1.0, PI / 2.0).unwrap(); 4]).unwrap()
    }

    #[test]
    fn circle_quarter_advance() {
        let c = circle();
        let n = next_bounce(&c, PhaseState::new(0.0, PI / 4.0)).unwrap();
        assert!((n.s - PI / 2.0).abs() < 1e-13);
        assert!((n.phi - PI / 4.0).abs() < 1e-13);
        assert!(((c.point(n.s) - c.point(0.0)).norm() - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn circle_diameter() {
        let c = circle();
        let n = next_bounce(&c, PhaseState::new(0.0, PI / 2.0)).unwrap();
        assert!((n.s - PI).abs() < 1e-13 && (n.phi - PI / 2.0).abs() < 1e-13);
    }

    #[test]
    fn circle_advance_wraps() {
        let c = circle();
        let n = next_bounce(&c, PhaseState::new(6.0, 0.3)).unwrap();
        assert!((n.s - (6.6 - 2.0 * PI)).abs() < 1e-12);
    }

    #[test]
    fn glancing_circle() {
        let c = circle();
        let phi = 1e-3;
        let n = next_bounce(&c, PhaseState::new(1.0, phi)).unwrap();
        assert!((n.s - (1.0 + 2.0 * phi)).abs() < 1e-13);
        assert!((n.phi - phi).abs() < 1e-13);
    }

    #[test]
    fn wall_escape() {
        let b = BuildingBlock::arc(1.0, PI / 2.0).unwrap();
        let n = next_bounce(&b, PhaseState::new(0.0, PI / 10.0)).unwrap();
        assert!((n.s - PI / 5.0).abs() < 1e-13);
        let err = next_bounce(&b, PhaseState::new(1.4, PI / 10.0)).unwrap_err();
        assert!(matches!(err, Error::EscapedWall { .. }));
    }

    #[test]
    fn rejects_bad_angle() {
        assert!(next_bounce(&circle(), PhaseState::new(0.0, 0.0)).is_err());
    }
}

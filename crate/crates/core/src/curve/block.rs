use std::f64::consts::PI;
use std::sync::Arc;

use super::geometry::{CurvePoint, Geometry, Vec2};
use super::profile::CurvatureProfile;
use crate::error::{Error, Result};

/// Curvature floor as a fraction of the base curvature.
pub const KAPPA_FLOOR_FRACTION: f64 = 0.2;
/// Tolerance of the mirror-symmetry check `κ(s) = κ(a - s)`.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Orientation-preserving isometry `p ↦ R(rotation) p + translation`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidMotion {
    pub rotation: f64,
    pub translation: Vec2,
}

impl RigidMotion {
    pub fn identity() -> Self {
        Self { rotation: 0.0, translation: Vec2::zeros() }
    }

    pub fn new(rotation: f64, translation: Vec2) -> Self {
        Self { rotation, translation }
    }

    #[inline]
    pub fn rotate(&self, v: Vec2) -> Vec2 {
        let (s, c) = self.rotation.sin_cos();
        Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y)
    }

    #[inline]
    pub fn apply(&self, p: Vec2) -> Vec2 {
        self.rotate(p) + self.translation
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &RigidMotion) -> RigidMotion {
        RigidMotion { rotation: self.rotation + other.rotation, translation: self.apply(other.translation) }
    }

    pub fn inverse(&self) -> RigidMotion {
        let inv = RigidMotion { rotation: -self.rotation, translation: Vec2::zeros() };
        RigidMotion { rotation: -self.rotation, translation: -inv.rotate(self.translation) }
    }
}

/// A symmetric, strictly convex, non-closed arc given by its curvature profile.
#[derive(Debug, Clone)]
pub struct BuildingBlock {
    profile: CurvatureProfile,
    geometry: Arc<Geometry>,
    turning: f64,
    chord: f64,
}

impl PartialEq for BuildingBlock {
    fn eq(&self, other: &Self) -> bool {
        self.profile == other.profile
    }
}

impl BuildingBlock {
    pub fn new(profile: CurvatureProfile) -> Result<Self> {
        let a = profile.length;
        let floor = KAPPA_FLOOR_FRACTION * profile.base;
        let min_kappa = profile.min_kappa();
        if min_kappa <= floor {
            return Err(Error::Convexity { min_kappa, floor });
        }
        let samples = 1024;
        let mut worst = 0.0f64;
        let mut probe = |s: f64| {
            worst = worst.max((profile.kappa(s) - profile.kappa(a - s)).abs());
        };
        for j in 0..=samples {
            probe(a * j as f64 / samples as f64);
        }
        for b in &profile.bumps {
            probe(b.center);
            probe(b.center + 0.5 * b.halfwidth);
        }
        if worst > SYMMETRY_TOL {
            return Err(Error::InvalidBlock(format!("curvature not symmetric about the midpoint (defect {worst:.3e})")));
        }
        let turning = profile.turning();
        if !(turning > 0.0 && turning < PI) {
            return Err(Error::InvalidBlock(format!("turning {turning} outside (0, π)")));
        }
        let geometry = Geometry::new(&profile);
        let chord = geometry.end_point().norm();
        Ok(Self { profile, geometry: Arc::new(geometry), turning, chord })
    }

    /// Constant-curvature arc of curvature `base` and arclength `length`.
    pub fn arc(base: f64, length: f64) -> Result<Self> {
        Self::new(CurvatureProfile::arc(base, length)?)
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn length(&self) -> f64 {
        self.profile.length
    }

    pub fn turning(&self) -> f64 {
        self.turning
    }

    pub fn chord(&self) -> f64 {
        self.chord
    }

    /// Map taking the block-local start frame to the end frame.
    pub fn end_motion(&self) -> RigidMotion {
        RigidMotion::new(self.geometry.end_theta(), self.geometry.end_point())
    }

    /// Point, tangent angle and curvature in the block-local frame.
    pub fn eval_geometry(&self, s: f64) -> Result<CurvePoint> {
        eval_geometry(&self.geometry, s)
    }
}

/// Evaluates a profile's reconstructed geometry at arclength `s`.
pub fn eval_geometry(geometry: &Geometry, s: f64) -> Result<CurvePoint> {
    let (lo, hi) = geometry.range();
    if !(s >= lo && s <= hi) {
        return Err(Error::Domain(format!("arclength {s} outside [{lo}, {hi}]")));
    }
    Ok(geometry.eval(s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::bump::Bump;

    #[test]
    fn unit_quarter_circle() {
        let b = BuildingBlock::arc(1.0, PI / 2.0).unwrap();
        let p = b.eval_geometry(PI / 2.0).unwrap();
        assert!((p.point - Vec2::new(1.0, 1.0)).norm() < 1e-15);
        assert!((p.tangent_angle - PI / 2.0).abs() < 1e-15);
        assert!((b.chord() - 2f64.sqrt()).abs() < 1e-15);
        let o = b.eval_geometry(0.0).unwrap();
        assert_eq!(o.point, Vec2::zeros());
        assert_eq!(o.tangent_angle, 0.0);
        assert!(b.eval_geometry(2.0).is_err());
        assert!(b.eval_geometry(-1e-9).is_err());
    }

    #[test]
    fn asymmetric_profile_rejected() {
        let p = CurvatureProfile::new(1.0, 1.5, vec![Bump::new(0.4, 0.1, 0.3)]).unwrap();
        assert!(matches!(BuildingBlock::new(p), Err(Error::InvalidBlock(_))));
    }

    #[test]
    fn convexity_floor_enforced() {
        let a = 1.5;
        let b = Bump::new(0.4, 0.1, -0.9);
        let p = CurvatureProfile::new(1.0, a, vec![b, b.mirrored(a)]).unwrap();
        assert!(matches!(BuildingBlock::new(p), Err(Error::Convexity { .. })));
    }

    #[test]
    fn closed_arc_rejected() {
        assert!(BuildingBlock::arc(1.0, 4.0).is_err());
    }

    #[test]
    fn motion_compose_inverse() {
        let m = RigidMotion::new(0.7, Vec2::new(1.0, -2.0));
        let id = m.compose(&m.inverse());
        assert!(id.rotation.abs() < 1e-15 && id.translation.norm() < 1e-15);
        let p = Vec2::new(0.3, 0.4);
        assert!((m.inverse().apply(m.apply(p)) - p).norm() < 1e-15);
    }
}

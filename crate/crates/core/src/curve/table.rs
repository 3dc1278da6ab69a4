use std::f64::consts::TAU;
use std::sync::Arc;

use super::block::{BuildingBlock, RigidMotion};
use super::geometry::{CurvePoint, Geometry, Vec2};
use super::profile::CurvatureProfile;
use crate::error::{Error, Result};

/// Closure tolerance for turning and endpoint gap.
pub const CLOSURE_TOL: f64 = 1e-10;

/// Glues `b2` after `b1`: concatenated profile plus the placement of `b2`
/// aligning its start point and tangent with the end of `b1`.
pub fn glue(b1: &BuildingBlock, b2: &BuildingBlock) -> Result<(CurvatureProfile, RigidMotion)> {
    let profile = b1.profile().concat(b2.profile())?;
    Ok((profile, b1.end_motion()))
}

/// A closed strictly convex boundary assembled from building blocks.
#[derive(Debug, Clone)]
pub struct BilliardTable {
    blocks: Vec<BuildingBlock>,
    joints: Vec<f64>,
    placements: Vec<RigidMotion>,
    total_length: f64,
    profile: CurvatureProfile,
    geometry: Arc<Geometry>,
    total_turning: f64,
}

/// Glues the blocks in order and checks that the chain closes up.
pub fn close_table(blocks: &[BuildingBlock]) -> Result<BilliardTable> {
    if blocks.is_empty() {
        return Err(Error::Domain("a table needs at least one block".into()));
    }
    let mut placements = Vec::with_capacity(blocks.len());
    let mut joints = Vec::with_capacity(blocks.len());
    let mut frame = RigidMotion::identity();
    let mut offset = 0.0;
    for b in blocks {
        placements.push(frame);
        joints.push(offset);
        frame = frame.compose(&b.end_motion());
        offset += b.length();
    }
    let turning_defect = frame.rotation - TAU;
    let endpoint_gap = frame.translation.norm();
    if turning_defect.abs() > CLOSURE_TOL || endpoint_gap > CLOSURE_TOL {
        return Err(Error::Closure { turning_defect, endpoint_gap });
    }
    let mut profile = blocks[0].profile().clone();
    for b in &blocks[1..] {
        profile = profile.concat(b.profile())?;
    }
    let geometry = Geometry::new(&profile);
    let total_turning = geometry.end_theta();
    Ok(BilliardTable {
        blocks: blocks.to_vec(),
        joints,
        placements,
        total_length: profile.length,
        profile,
        geometry: Arc::new(geometry),
        total_turning,
    })
}

impl BilliardTable {
    pub fn blocks(&self) -> &[BuildingBlock] {
        &self.blocks
    }

    /// Arclength offsets of the block starts.
    pub fn joints(&self) -> &[f64] {
        &self.joints
    }

    pub fn placements(&self) -> &[RigidMotion] {
        &self.placements
    }

    /// Perimeter `ℓ_0`.
    pub fn length(&self) -> f64 {
        self.total_length
    }

    pub fn profile(&self) -> &CurvatureProfile {
        &self.profile
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    #[inline]
    fn wrap(&self, s: f64) -> (f64, f64) {
        let laps = (s / self.total_length).floor();
        let mut r = s - laps * self.total_length;
        if r >= self.total_length {
            r -= self.total_length;
        }
        (r.max(0.0), laps)
    }

    /// Boundary point at (any) arclength `s`, periodic in `ℓ_0`.
    #[inline]
    pub fn point(&self, s: f64) -> Vec2 {
        self.geometry.point(self.wrap(s).0)
    }

    /// Lifted tangent angle: `θ(s + ℓ_0) = θ(s) + 2π`.
    #[inline]
    pub fn theta(&self, s: f64) -> f64 {
        let (r, laps) = self.wrap(s);
        self.geometry.theta(r) + laps * self.total_turning
    }

    #[inline]
    pub fn point_theta(&self, s: f64) -> (Vec2, f64) {
        let (r, laps) = self.wrap(s);
        let (p, th) = self.geometry.point_theta(r);
        (p, th + laps * self.total_turning)
    }

    #[inline]
    pub fn kappa(&self, s: f64) -> f64 {
        self.profile.kappa(self.wrap(s).0)
    }

    pub fn eval(&self, s: f64) -> CurvePoint {
        let (r, laps) = self.wrap(s);
        let mut p = self.geometry.eval(r);
        p.tangent_angle += laps * self.total_turning;
        p
    }

    /// Index of the block containing table arclength `s` (mod `ℓ_0`).
    pub fn block_at(&self, s: f64) -> usize {
        let r = self.wrap(s).0;
        self.joints.partition_point(|&j| j <= r).saturating_sub(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn quarter() -> BuildingBlock {
        BuildingBlock::arc(1.0, PI / 2.0).unwrap()
    }

    #[test]
    fn quarter_plus_quarter_is_half_circle() {
        let (p, m) = glue(&quarter(), &quarter()).unwrap();
        assert_eq!(p.length, PI);
        assert!(p.bumps.is_empty() && p.base == 1.0);
        assert!((m.rotation - PI / 2.0).abs() < 1e-15);
        assert!((m.translation - Vec2::new(1.0, 1.0)).norm() < 1e-15);
        // the glued copy of b2 starts where b1 ends, tangent continuous
        let g = Geometry::new(&p);
        let q = quarter();
        let moved = m.apply(q.geometry().point(0.7));
        assert!((moved - g.point(PI / 2.0 + 0.7)).norm() < 1e-14);
    }

    #[test]
    fn four_quarters_close_to_unit_circle() {
        let t = close_table(&vec![quarter(); 4]).unwrap();
        assert!((t.length() - 2.0 * PI).abs() < 1e-15);
        assert!((t.point(t.length()) - t.point(0.0)).norm() < 1e-10);
        assert!((t.theta(2.0 * PI + 0.5) - (2.0 * PI + 0.5)).abs() < 1e-13);
        assert_eq!(t.joints(), &[0.0, PI / 2.0, PI, 1.5 * PI]);
        assert_eq!(t.block_at(PI + 0.1), 2);
    }

    #[test]
    fn mixed_radius_chain_does_not_close() {
        let big = BuildingBlock::arc(0.5, PI).unwrap();
        let err = close_table(&[quarter(), quarter(), quarter(), big]).unwrap_err();
        match err {
            Error::Closure { turning_defect, endpoint_gap } => {
                assert!(turning_defect.abs() < 1e-12);
                assert!(endpoint_gap > 0.1);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}

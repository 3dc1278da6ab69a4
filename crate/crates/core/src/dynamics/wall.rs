use serde::{Deserialize, Serialize};

use super::map::advance;
use crate::curve::BuildingBlock;
use crate::error::{Error, Result};

/// Bounce cap for a single wall shot.
pub const MAX_WALL_BOUNCES: usize = 1_000_000;

/// Trajectory launched from the start of an open block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WallShot {
    /// Launch angle against the start tangent.
    pub theta: f64,
    /// Arclengths of the bounces after the launch, strictly increasing.
    pub bounces: Vec<f64>,
    /// Outgoing angles at each bounce.
    pub angles: Vec<f64>,
}

impl WallShot {
    /// Number of bounces before the ball leaves the wall.
    pub fn escape_index(&self) -> usize {
        self.bounces.len()
    }

    /// Outgoing angle at the last bounce (the launch angle if there is none).
    pub fn exit_angle(&self) -> f64 {
        self.angles.last().copied().unwrap_or(self.theta)
    }

    /// 1-based index and distance of the bounce closest to `target`.
    pub fn nearest(&self, target: f64) -> Option<(usize, f64)> {
        self.bounces
            .iter()
            .enumerate()
            .map(|(i, &s)| (i + 1, (s - target).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))
    }
}

/// Launches from `γ(0)` at angle `theta` and follows the ball until it
/// leaves the block.
pub fn shoot_wall(block: &BuildingBlock, theta: f64) -> Result<WallShot> {
    shoot_wall_capped(block, theta, MAX_WALL_BOUNCES)
}

pub fn shoot_wall_capped(block: &BuildingBlock, theta: f64, cap: usize) -> Result<WallShot> {
    if !(theta > 0.0 && theta < std::f64::consts::FRAC_PI_2) {
        return Err(Error::Domain(format!("launch angle {theta} outside (0, π/2)")));
    }
    let mut bounces = Vec::new();
    let mut angles = Vec::new();
    let (mut s, mut phi) = (0.0, theta);
    while let Some((s1, phi1)) = advance(block, s, phi) {
        if bounces.len() >= cap {
            return Err(Error::IterationCap { cap });
        }
        bounces.push(s1);
        angles.push(phi1);
        s = s1;
        phi = phi1;
    }
    Ok(WallShot { theta, bounces, angles })
}

/// Outcome of [`is_match`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchOutcome {
    pub matched: bool,
    /// 1-based index of the bounce nearest the midpoint.
    pub p: usize,
    /// Distance of that bounce from the midpoint.
    pub residual: f64,
}

/// Whether the shot at `theta` bounces at the block midpoint within `tol`.
pub fn is_match(block: &BuildingBlock, theta: f64, tol: f64) -> Result<MatchOutcome> {
    let shot = shoot_wall(block, theta)?;
    Ok(match_of(&shot, block.length(), tol))
}

pub(crate) fn match_of(shot: &WallShot, length: f64, tol: f64) -> MatchOutcome {
    match shot.nearest(0.5 * length) {
        Some((p, residual)) => MatchOutcome { matched: residual <= tol, p, residual },
        None => MatchOutcome { matched: false, p: 0, residual: f64::INFINITY },
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
    fn eighth_angle_hits_midpoint_then_end() {
        let shot = shoot_wall(&quarter(), PI / 8.0).unwrap();
        assert_eq!(shot.escape_index(), 2);
        assert!((shot.bounces[0] - PI / 4.0).abs() < 1e-13);
        assert!((shot.bounces[1] - PI / 2.0).abs() < 1e-13);
        let m = is_match(&quarter(), PI / 8.0, 1e-9).unwrap();
        assert!(m.matched && m.p == 1 && m.residual < 1e-13);
    }

    #[test]
    fn tenth_angle_escapes_without_midpoint() {
        let shot = shoot_wall(&quarter(), PI / 10.0).unwrap();
        assert_eq!(shot.escape_index(), 2);
        assert!((shot.bounces[0] - PI / 5.0).abs() < 1e-13);
        assert!((shot.bounces[1] - 2.0 * PI / 5.0).abs() < 1e-13);
        assert!(!is_match(&quarter(), PI / 10.0, 1e-9).unwrap().matched);
    }

    #[test]
    fn resonant_family() {
        let m = is_match(&quarter(), PI / 24.0, 1e-9).unwrap();
        assert!(m.matched && m.p == 3);
        assert!(!is_match(&quarter(), 0.37, 1e-9).unwrap().matched);
    }

    #[test]
    fn cap_reported() {
        let err = shoot_wall_capped(&quarter(), 1e-3, 10).unwrap_err();
        assert_eq!(err, Error::IterationCap { cap: 10 });
    }
}

use serde::{Deserialize, Serialize};

use super::map::{advance, reflection_residual, Boundary, PhaseState};
use crate::curve::BilliardTable;
use crate::error::{Error, Result};

/// Closure tolerance in `(s, φ)` for orbits built from matched angles.
pub const ORBIT_CLOSURE_TOL: f64 = 1e-9;
const MAX_ORBIT_BOUNCES: usize = 1_000_000;

/// A finite bounce sequence on a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Orbit {
    /// Bounce states, arclength reduced into `[0, ℓ_0)`.
    pub states: Vec<PhaseState>,
    /// `chords[i]` joins bounce `i` to bounce `i + 1` (cyclically if closed).
    pub chords: Vec<f64>,
    pub perimeter: f64,
    pub closed: bool,
    pub period: usize,
    /// Mismatch in `(s, φ)` between the last state and the first.
    pub closure_residual: f64,
    /// Largest violation of the reflection law over all bounces.
    pub reflection_residual: f64,
}

impl Orbit {
    /// Closed polygon through the given lifted arclengths, with angles and
    /// residuals recomputed from the geometry.
    pub(crate) fn closed_polygon(table: &BilliardTable, lifted: &[f64], closure_residual: f64) -> Orbit {
        let l = table.length();
        let n = lifted.len();
        let at = |i: usize| if i < n { lifted[i] } else { lifted[i - n] + l };
        let mut states = Vec::with_capacity(n);
        let mut chords = Vec::with_capacity(n);
        let mut reflection = 0.0f64;
        for i in 0..n {
            let (p, th) = table.point_theta(at(i));
            let q = table.point(at(i + 1));
            let d = q - p;
            chords.push(d.norm());
            let phi = d.y.atan2(d.x) - th;
            states.push(PhaseState::new(at(i).rem_euclid(l), phi.rem_euclid(std::f64::consts::TAU)));
            let prev = if i == 0 { lifted[n - 1] - l } else { lifted[i - 1] };
            reflection = reflection.max(reflection_residual(table, prev, at(i), at(i + 1)));
        }
        let perimeter = chords.iter().sum();
        Orbit { states, chords, perimeter, closed: true, period: n, closure_residual, reflection_residual: reflection }
    }
}

/// Follows the shot from the start of the first block at angle `theta`
/// until it returns to the start, and checks that it closes.
pub fn closed_orbit_from_match(table: &BilliardTable, theta: f64) -> Result<Orbit> {
    if !(theta > 0.0 && theta < std::f64::consts::PI) {
        return Err(Error::Domain(format!("launch angle {theta} outside (0, π)")));
    }
    let l = table.length();
    let mut lifted = vec![0.0];
    let (mut s, mut phi) = (0.0, theta);
    loop {
        let (s1, phi1) = advance(table, s, phi).ok_or_else(|| Error::NoConvergence("billiard map failed".into()))?;
        if s1 >= l * (1.0 - 1e-6) {
            let residual = (s1 - l).abs().max((phi1 - theta).abs());
            if residual > ORBIT_CLOSURE_TOL {
                return Err(Error::ClosureFailure { theta, residual });
            }
            return Ok(Orbit::closed_polygon(table, &lifted, residual));
        }
        if lifted.len() >= MAX_ORBIT_BOUNCES {
            return Err(Error::IterationCap { cap: MAX_ORBIT_BOUNCES });
        }
        lifted.push(s1);
        s = s1;
        phi = phi1;
    }
}

/// Open orbit of `count` bounces from `start`, arclengths left lifted.
pub fn iterate<B: Boundary + ?Sized>(curve: &B, start: PhaseState, count: usize) -> Result<Vec<PhaseState>> {
    let mut out = Vec::with_capacity(count + 1);
    out.push(start);
    let (mut s, mut phi) = (start.s, start.phi);
    for _ in 0..count {
        let (s1, phi1) =
            advance(curve, s, phi).ok_or(Error::EscapedWall { exit_s: s, exit_angle: phi })?;
        out.push(PhaseState::new(s1, phi1));
        s = s1;
        phi = phi1;
    }
    Ok(out)
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
    fn octagon_on_circle() {
        let o = closed_orbit_from_match(&circle(), PI / 8.0).unwrap();
        assert_eq!(o.period, 8);
        assert!((o.perimeter - 16.0 * (PI / 8.0).sin()).abs() < 1e-12);
        assert!(o.reflection_residual < 1e-10);
        assert!(o.closure_residual < 1e-12);
    }

    #[test]
    fn non_matching_angle_fails() {
        let err = closed_orbit_from_match(&circle(), 0.37).unwrap_err();
        assert!(matches!(err, Error::ClosureFailure { .. }));
    }

    #[test]
    fn reversed_rays_retrace_chords() {
        let c = circle();
        let fwd = iterate(&c, PhaseState::new(0.3, 0.2), 5).unwrap();
        // leaving bounce k + 1 at angle π - φ_{k+1} points back at bounce k
        for k in 0..5 {
            let (p, th) = c.point_theta(fwd[k + 1].s);
            let dir = th + PI - fwd[k + 1].phi;
            let back = (c.point(fwd[k].s) - p).normalize();
            let u = crate::curve::Vec2::new(dir.cos(), dir.sin());
            assert!((u - back).norm() < 1e-10);
        }
    }
}

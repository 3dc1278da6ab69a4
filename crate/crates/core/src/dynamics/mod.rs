//! Billiard dynamics on closed tables and on open blocks ("walls").

pub mod map;
pub mod ngon;
pub mod orbit;
pub mod wall;

pub use map::{next_bounce, reflection_residual, Boundary, PhaseState};
pub use ngon::max_perimeter_ngon;
pub use orbit::{closed_orbit_from_match, iterate, Orbit};
pub use wall::{is_match, shoot_wall, MatchOutcome, WallShot};

//! Curves as curvature-versus-arclength profiles: building blocks, gluing,
//! closed tables, constraint-preserving perturbations and congruence.

pub mod block;
pub mod bump;
pub mod congruence;
pub mod geometry;
pub mod perturb;
pub mod profile;
pub mod table;

pub use block::{eval_geometry, BuildingBlock, RigidMotion};
pub use bump::Bump;
pub use congruence::congruence_distance;
pub use geometry::{CurvePoint, Geometry, Vec2};
pub use perturb::{perturb_block, Perturbed, Window};
pub use profile::CurvatureProfile;
pub use table::{close_table, glue, BilliardTable};

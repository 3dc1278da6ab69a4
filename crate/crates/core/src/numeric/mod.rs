//! Numerical kernels shared by the geometry, dynamics and invariant code.

pub mod cheb;
pub mod cumulative;
pub mod quad;
pub mod roots;

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod construction;
pub mod curve;
pub mod dynamics;
pub mod error;
pub mod invariants;
pub mod io;
pub mod lazutkin;
pub mod numeric;
pub mod verify;

pub use error::{Error, Result};

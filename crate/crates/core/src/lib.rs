#![no_std]
// `!(x > 0.0)` style guards are kept on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod additive;
pub mod blowup;
pub mod covering;
pub mod error;
pub mod extract;
pub mod generators;
pub mod geometry;
pub mod incidence;
pub mod nonconc;
pub mod product;
pub mod projection;
pub mod scale;

pub use error::{Error, Result};
pub use geometry::{Direction, DirectionSet, Point, PointSet2D, ScalarSet};
pub use scale::Scale;

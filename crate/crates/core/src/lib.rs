//! Numerical laboratory for planar quasiconformal maps: FFT-based Beurling
//! and Cauchy transforms, a Neumann-series Beltrami solver and estimators
//! for Hölder, Lipschitz and bilipschitz regularity.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod beltrami;
pub mod error;
pub mod experiment;
pub mod field;
pub mod geometry;
pub mod regularity;
pub mod transforms;

pub use error::{QcError, Result};
pub use field::{Field, GridSpec};
pub use geometry::Domain;

//! Nonparametric internal-model output regulation.
//!
//! The numeric core is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! at the bottom of this file fix the common `f64` instantiations.

// Index loops mirror the matrix formulas; `!(x > 0)` style checks reject NaN.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod internal_model;
pub mod linalg;
pub mod oracles;
pub mod plants;
pub mod regulator;
pub mod scalar;
pub mod scenario;
pub mod sim;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type Matrix64 = linalg::Matrix<f64>;
pub type Matrix32 = linalg::Matrix<f32>;

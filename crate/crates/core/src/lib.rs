// `!(x > 0.0)` is used on purpose throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Extremes of non-homogeneous Gaussian random fields: Shepp-statistic
//! fields, Pickands-type constants, tail asymptotics and Gumbel limits.

pub mod asymptotics;
pub mod constants;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod model;
pub mod par;
pub mod quadrature;
pub mod rng;
pub mod simulate;
pub mod special;

pub use error::{Error, Result};

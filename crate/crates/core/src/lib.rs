//! Gradient-flow feedback optimization of LTI plants with costs learned from
//! sporadic evaluations, plus tracking certificates.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod config;
pub mod cost;
pub mod error;
pub mod experiment;
pub mod learning;
pub mod linalg;
pub mod plant;
pub mod presets;
pub mod selftest;
pub mod sim;

pub use error::{Error, Result};

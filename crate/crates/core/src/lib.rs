//! Lifshitz forces between metallic bodies at finite temperature.
//!
//! The crate covers dielectric models on the real and imaginary frequency
//! axes, Drude fitting of optical data, the plate–plate and sphere–plate
//! force (homogeneous or with one coating layer), roughness averaging and
//! comparison with measured force curves.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod constants;
pub mod dielectric;
pub mod drude_fit;
pub mod error;
pub mod experiments;
pub mod lifshitz;
pub mod output;
pub mod presets;
pub mod quadrature;
pub mod roughness;
pub mod summation;
pub mod units;

pub use error::{Error, Result};

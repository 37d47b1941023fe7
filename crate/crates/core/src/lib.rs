//! Log-Gaussian distributions, density estimation and density-based
//! classification on non-compact Riemannian symmetric spaces.
//!
//! The crate is `no_std` (it needs `alloc`). IO, file formats and the command
//! line live in the companion `symspace` crate.

#![no_std]
// `!(x > 0.0)` rejects NaN on purpose; index loops mirror the matrix formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]
extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod classify;
pub mod descriptors;
pub mod distributions;
pub mod error;
pub mod estimators;
pub mod linalg;
pub mod manifolds;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};

//! Discretized geometry and harmonic analysis on the truncated parabola
//! `P = {(t, t^2) : t in [-1, 1]}`.
//!
//! The crate is `no_std` (with `alloc`) unless the default `std` feature is
//! enabled. `parallel` turns on rayon for the row, pair and tuple sweeps; all
//! reductions are assembled in a fixed order so results do not depend on the
//! thread count.
#![cfg_attr(not(feature = "std"), no_std)]
// `!(x >= y)` is used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod circle;
pub mod discretized;
pub mod energy;
pub mod error;
pub mod fourier;
pub mod furstenberg;
pub mod hyperbolic;
pub mod rng;

mod math;
mod par;

pub use error::{Error, Result};

/// A point of the plane. One-dimensional data uses `[x, 0.0]`.
pub type Point = [f64; 2];

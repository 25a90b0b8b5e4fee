//! Trapping-chain construction for the skew product
//! `F(z, w) = (exp f1(z) + delta * exp Re f2(w), exp Re f2(w))`.
//!
//! Everything here is `no_std` with `alloc`; file formats, the command line
//! and the pipeline driver live in the companion `trapchain` crate.
#![no_std]
// NaN must fail these tests, which the negated form expresses directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod approx;
pub mod dynamics;
mod exact;
pub mod interval;
mod math;
pub mod render;
pub mod scaffold;
pub mod targets;
pub mod verify;

pub use num_complex::Complex64;

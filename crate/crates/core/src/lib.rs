//! Frequency-function analysis of elliptic solutions at conical boundary points.

// NaN-rejecting guards are written as `!(x > 0.0)` on purpose.
#![allow(
    clippy::neg_cmp_op_on_partial_ord,
    clippy::needless_range_loop,
    clippy::too_many_arguments
)]

pub mod almgren;
pub mod cases;
pub mod cli;
pub mod coefficients;
pub mod config;
pub mod error;
pub mod field;
pub mod fourier;
pub mod geometry;
pub mod logexample;
pub mod numerics;
pub mod output;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};

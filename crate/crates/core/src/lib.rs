//! Discrete Gabor analysis on sheared lattices with sparsity-driven window
//! and lattice optimization.
//!
//! * [`dsp`]: signals, DFT, time-frequency shifts, chirps, Gaussian windows.
//! * [`lattice`], [`gabor`], [`frame`], [`boundary`]: lattices in normal form,
//!   the transform, synthesis, masking, frame bounds and dual windows.
//! * [`optim`]: sparsity metrics, gradients and the window optimizers.
//! * [`adapt`]: lattices adapted to chirped Gaussian windows.
//! * [`pipeline`]: pattern extraction, reduction and the alternating loop.
//! * [`generate`], [`render`], [`io`]: test signals, images and file formats.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod adapt;
pub mod boundary;
pub mod dsp;
mod error;
pub mod exec;
pub mod frame;
pub mod gabor;
pub mod generate;
pub mod io;
pub mod lattice;
pub mod optim;
pub mod pipeline;
pub mod render;

pub use error::{GaborError, Result};
pub use num_complex::Complex64;

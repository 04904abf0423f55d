//! Gabor-frame representations of propagators for constant-coefficient
//! evolution equations.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. Enabling `parallel` spreads matrix assembly and root sampling over
//! a rayon pool; results are identical to the sequential build.
//!
//! Layout:
//!
//! * [`grid`] sampled functions on periodic grids and their Fourier transforms
//! * [`frames`] windows, lattices, analysis/synthesis, frame bounds, dual windows
//! * [`stft`] short-time Fourier transform and decay-model fitting
//! * [`propagators`] evolution operators, propagator symbols, Hadamard–Petrowsky sampling
//! * [`gabor_matrix`] Gabor matrices of Fourier multipliers and their decay
//! * [`solver`] Cauchy problems through the Gabor matrix, with a Fourier-side reference

#![cfg_attr(not(feature = "std"), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN. Per-axis loops index
// several fixed-size arrays at once.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod error;
pub mod fft;
pub mod fit;
pub mod frames;
pub mod gabor_matrix;
pub mod grid;
pub mod linalg;
mod par;
pub mod phase_space;
pub mod propagators;
pub mod quasi;
pub mod solver;
pub mod stft;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Largest supported spatial dimension.
pub const MAX_DIM: usize = 4;

pub(crate) type C64 = Complex64;

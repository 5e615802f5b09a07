//! Depth-wise convolution performed in a cascaded Haar-wavelet domain.
//!
//! The layer decomposes its input with a stride-2 Haar filter bank, runs a
//! small-kernel depth-wise convolution on every frequency band at every
//! level, and recombines the bands through the inverse transform, so a
//! `k`-tap kernel reaches a `2^levels * k` receptive field. Everything is
//! CPU-only, deterministic, and available in both f32 and f64; f64 is the
//! precision all verification oracles run at.
//!
//! Module map:
//! - [`tensor`] — dense rank-4 containers and elementwise arithmetic.
//! - [`wavelet`] — single-level and cascaded 2D Haar transforms.
//! - [`conv`] — strided/padded/transposed depth-wise convolution.
//! - [`wtconv`] — the layer itself: parameters, forward pass, sizing.
//! - [`grad`] — hand-derived reverse-mode gradients and plain SGD.
//! - [`analysis`] — multiply-accumulate cost model and gradient-based
//!   effective-receptive-field maps.
//! - [`toytrain`] — a tiny frequency-discrimination training harness.

pub mod analysis;
pub mod conv;
pub mod error;
pub mod grad;
pub mod macs;
pub mod rng;
pub mod tensor;
pub mod toytrain;
pub mod wavelet;
pub mod wtconv;

pub use error::{Error, Result};
pub use tensor::{Element, Tensor4};

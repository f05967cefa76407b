//! Index detection for repetition-coded generalized spatial modulation (RCSM).
//!
//! A slot of `M` symbol vectors is sent from the same set of `K` out of `L`
//! transmit antennas; the receiver recovers that active set from the `M`
//! observations at its `N` antennas. The crate provides the signal model,
//! three detectors (correlator, exhaustive Gaussian-approximation ML and
//! CAVI), the rank-1 kernels they run on, and a Chernoff-bound analysis
//! of the ML index-error probability.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod analysis;
pub mod detectors;
pub mod error;
pub mod model;
pub mod numerics;

pub use error::{Error, Result};
pub use num_complex::Complex64;

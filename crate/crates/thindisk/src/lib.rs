//! Self-gravity of infinitesimally thin disks.
//!
//! The in-plane force is written as a sum over cells of closed-form kernel
//! integrals times the cell density and its slopes. On uniform Cartesian and
//! logarithmic polar grids these sums are discrete convolutions, evaluated
//! with zero-padded FFTs.

pub mod analysis;
pub mod baselines;
pub mod bench;
pub mod cache;
pub mod cartesian_kernels;
pub mod convolve;
pub mod density;
pub mod error;
pub mod grid;
pub mod gridio;
pub mod polar_kernels;
pub mod quadrature;
pub mod solver;
pub mod study;

pub use error::{Error, Result};

//! Simulation library for an Otto engine whose working substance is a pair of
//! entangled two-level detectors coupled to a massless scalar field, with one
//! detector (the observer) uniformly accelerated.
//!
//! The crate is organised bottom-up:
//!
//! - [`algebra`]: the 4×4 operator algebra of the two-qubit system and the
//!   closed-form traces of the second-order Γ operators.
//! - [`kinematics`]: Rindler worldlines, stage durations and proper-time ratios.
//! - [`wightman`]: spectral kernels of the vacuum two-point functions in 1+1 and
//!   1+3 dimensions, including imaginary-order Bessel functions.
//! - [`quadrature`]: adaptive Gauss–Kronrod integration over semi-infinite
//!   spectral domains and tensor Gauss–Legendre rules over time squares.
//! - [`engine`]: the spectral integral I₁, the δρ traces, works, heats and
//!   efficiencies of one cycle.
//! - [`protocol`]: the constraint chain that turns parameters into a valid cycle.
//! - [`oracle`]: a brute-force evaluation of the traces that integrates the
//!   second-order perturbation series numerically in time.

pub mod algebra;
pub mod engine;
mod error;
pub mod kinematics;
pub mod oracle;
pub mod protocol;
pub mod quadrature;
pub mod wightman;

pub use error::{Error, Result};
pub use num_complex::Complex64;

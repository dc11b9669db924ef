//! Numerical inverse-scattering-transform engine for the combined
//! nonlinear Schrödinger–Gerdjikov–Ivanov equation
//!
//! ```text
//! u_t = i u_xx - 2i |u|^2 u + u^2 conj(u)_x + (i/2) |u|^4 u
//! ```
//!
//! The pipeline: direct scattering of a decaying potential through the
//! Volterra equations for the modified Jost functions, assembly of the
//! scattering coefficients `a`, `b` and the split reflection pair
//! `(r_+, r_-)` on the `z = k^2` line, FFT Cauchy projectors, the scalar
//! `delta` Riemann–Hilbert factors, the projection fixed-point solve of
//! the vector Riemann–Hilbert problem (plain system on `x >= 0`,
//! delta-conjugated on `x < 0`), potential reconstruction, explicit time
//! evolution of the reflection data, and an independent integrating-factor
//! pseudo-spectral reference solver for cross-validation.

pub mod cauchy;
pub mod error;
pub mod evolution;
pub mod fourier;
pub mod grid;
pub mod potential;
pub mod reconstruct;
pub mod rh;
pub mod scattering;

pub use error::{Error, Result};
pub use grid::{make_grids, SpatialGrid, SpectralGrid};
pub use potential::{compute_w, norms, sample_potential, NormReport, PotentialField, PresetSpec};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;

/// Shorthand for `C64::new`.
#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

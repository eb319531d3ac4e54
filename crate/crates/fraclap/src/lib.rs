//! Fractional powers of the one-dimensional discrete Laplacian on the mesh
//! `Z_h = { h*j : j in Z }`.
//!
//! The crate provides:
//!
//! - [`specialfn`]: log-Gamma, Gamma ratios and exponentially scaled modified
//!   Bessel functions, plus the semidiscrete heat kernel `G(m,t) = e^{-2t} I_m(2t)`.
//! - [`kernels`]: the closed-form convolution kernels of `(-Δ_h)^s` and
//!   `(-Δ_h)^{-s}`, their normalizing constants, the jump probability law and
//!   an independent heat-semigroup quadrature oracle for both.
//! - [`operators`]: application of `(-Δ_h)^{±s}`, the discrete Laplacian, the
//!   heat semigroup, discrete derivatives, Hölder seminorms, the Fourier
//!   multiplier oracle and the semidiscrete extension problem.
//! - [`dirichlet`]: the nonlocal Dirichlet problem on `B_R^h` as a
//!   diagonal-plus-Toeplitz SPD system solved by conjugate gradients, with the
//!   barrier function and maximum-principle checks.
//! - [`continuum`]: continuous-side references (singular-integral fractional
//!   Laplacian, Riesz potentials, mesh restriction, test-function corpus).
//!
//! With the default `parallel` feature the per-point loops of the operator and
//! quadrature routines run on rayon; without it everything falls back to
//! sequential iterators. Both paths produce bitwise identical results because
//! every output point is an independently computed fixed-order reduction.

pub mod continuum;
pub mod dirichlet;
mod error;
pub mod fft;
pub mod grid;
pub mod kernels;
pub mod operators;
mod par;
pub mod quad;
pub mod specialfn;

pub use error::Error;
pub use grid::GridFunction;
pub use kernels::{FracOrder, KernelSign, KernelTable};

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

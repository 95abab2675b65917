//! Explicit counterexamples to observability inequalities.
//!
//! The crate builds families of solutions of the adjoint rotated fractional
//! heat equation `(∂t + z̄(-Δ)^{α/2}) g = 0` on ℝ and 𝕋, and of the adjoint
//! Kolmogorov equation `(∂t - v²∂x - ∂v²) g = 0` on 𝕋×ℝ and 𝕋×(-1,1), whose
//! observability quotient
//!
//! ```text
//!   |g(T)|_{L²(Ω)} / |g|_{L²((0,T)×ω)}
//! ```
//!
//! blows up as the semiclassical parameter `h → 0`. Alongside the solutions it
//! provides the numerical machinery used to check every intermediate estimate:
//!
//! - [`spectral`]: grids, semiclassical Fourier transforms, L² norms and
//!   Poisson periodization.
//! - [`rfhe`]: band-limited coherent states and the rotated fractional heat
//!   semigroup.
//! - [`saddle`]: saddle-point evaluation of `∫ e^{-ξ²/2h + r(ξ)/h^α} u(ξ) dξ`
//!   with a brute-force quadrature oracle.
//! - [`eigen`]: the Dirichlet ground state of `-∂v² + (ξ̃v)²` on (-1,1) for
//!   complex `ξ̃`, via a power-series shooting method.
//! - [`kolmogorov`]: Kolmogorov solutions with explicit and computed
//!   eigendata.
//! - [`observability`]: the quotient experiment and its CSV export.
//! - [`cli`]: the `obsgap` command line.
//!
//! # Examples
//!
//! Each capability has a runnable example:
//!
//! ```bash
//! cargo run --release --example coherent_state
//! cargo run --release --example poisson_periodization
//! cargo run --release --example saddle_point
//! cargo run --release --example eigen_table
//! cargo run --release --example delta_product
//! cargo run --release --example kolmogorov_line
//! cargo run --release --example kolmogorov_interval
//! cargo run --release --example pointwise_estimates
//! cargo run --release --example observability_sweep -- quotient.csv
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod eigen;
mod error;
pub mod fit;
pub mod kolmogorov;
pub mod observability;
pub mod quad;
pub mod rfhe;
pub mod saddle;
pub mod spectral;

pub use error::{Error, Result};
pub use num_complex::Complex64;

/// Shorthand used throughout the crate.
pub type C64 = Complex64;

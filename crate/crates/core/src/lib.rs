//! Prescribed-mass standing waves of the Schrödinger–Poisson equation with combined
//! power nonlinearities
//!
//! ```text
//! −Δu + λu + (|x|⁻¹ ∗ |u|²) u = |u|^{p−2}u + μ|u|^{q−2}u,   |u|₂ = a
//! ```
//!
//! on radial fields in ℝ³: discretization, the energy and its fiber maps, sharp
//! Gagliardo–Nirenberg constants and mass thresholds, the local-minimum and
//! mountain-pass solvers, and the time-dependent flow.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constants;
pub mod dynamics;
pub mod error;
pub mod field;
pub mod functionals;
pub mod grid;
pub mod io;
pub mod linalg;
pub mod params;
pub mod radial;
pub mod solvers;
pub mod spline;

pub use error::{Error, Result};
pub use field::RadialField;
pub use functionals::{EnergyBreakdown, FiberMap, FiberProfile, FiberRegime};
pub use grid::{make_grid, GridSpec, RadialGrid, Spacing};
pub use params::ProblemParams;

//! Magnetic geodesic flow on constant-curvature surfaces.
//!
//! The crate models the universal covers of closed surfaces of constant
//! curvature `kappa` (sphere, plane, hyperbolic disc) in one conformal chart,
//! simulates the magnetic flow of the twisted symplectic form
//! `dλ - s·π*σ` on the tangent bundle, and evaluates and certifies the
//! Hofer-Zehnder capacity of the magnetic disc bundle `D_r Σ`:
//!
//! ```text
//! c_HZ = 2π r² / (sqrt(s² + κ r²) + |s|)      for s ≠ 0, s² + κ r² > 0
//! ```
//!
//! Modules:
//! - [`geometry`]: conformal model, distances, exponential map, geodesic circles, charts.
//! - [`dynamics`]: the twisted form, Hamiltonian vector fields, adaptive integration.
//! - [`analysis`]: first-return periods, circle fits, swept area, escape witness.
//! - [`capacity`]: closed-form capacity, admissible profiles, lower-bound certificates.
//! - [`verify`]: the invariant suites behind `magcap verify`.

pub mod analysis;
pub mod capacity;
pub mod dynamics;
mod error;
pub mod geometry;
pub mod verify;

pub use error::{Error, Result};

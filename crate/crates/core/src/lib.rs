//! Numerical machinery for first and second variations of geodesic length
//! functions over the Teichmüller space of a once-punctured torus.
//!
//! The crate is layered bottom-up:
//!
//! * [`hyperbolic`]: upper-half-plane geometry, generic over the scalar type.
//! * [`surface`]: Fuchsian group model, fundamental domains, quadrature mesh.
//! * [`differentials`]: cusp forms, relative Poincaré series, harmonic
//!   Beltrami differentials and the Weil–Petersson pairing.
//! * [`geodesic_ops`]: periodic functions along closed geodesics and the
//!   spectral line operators.
//! * [`resolvent`]: the surface operator `(□ + 1)⁻¹` by automorphic kernel
//!   summation.
//! * [`variation`]: first/second variation formulas and inequality audits.
//! * [`family`]: Fenchel–Nielsen families and the finite-difference oracle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod differentials;
pub mod error;
pub mod family;
pub mod geodesic_ops;
pub mod hyperbolic;
pub mod quadrature;
pub mod resolvent;
pub mod scalar;
pub mod surface;
pub mod variation;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use scalar::Real;

/// Möbius transformation with `f64` entries.
pub type Mobius = hyperbolic::MobiusTransform<f64>;
/// Point of the upper half-plane with `f64` coordinates.
pub type Point = hyperbolic::HPoint<f64>;
/// Geodesic axis with `f64` data.
pub type Axis = hyperbolic::GeodesicAxis<f64>;

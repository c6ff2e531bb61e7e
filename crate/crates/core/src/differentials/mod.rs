//! Holomorphic quadratic differentials and harmonic Beltrami differentials.

mod beltrami;
mod cusp_form;
mod poincare;

use std::fmt::Debug;

use num_complex::Complex64;

pub use beltrami::{
    basis_quadratic, harmonic_from_pairings, harmonic_projection, pointwise_product, sup_norm,
    wp_gram, BeltramiSample, HarmonicBeltrami, SupNorm,
};
pub use cusp_form::CuspForm;
pub use poincare::{rel_poincare_theta, RelativePoincareSeries};

/// A holomorphic quadratic differential `q(z) dz²` on the surface, given in
/// user coordinates.
pub trait QuadDifferential: Send + Sync + Debug {
    fn eval(&self, z: Complex64) -> Complex64;
    /// Bound on the relative error of `eval`.
    fn residual_bound(&self) -> f64;
    fn label(&self) -> String;
}

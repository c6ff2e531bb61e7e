//! The resolvent `(□ + 1)⁻¹` on the surface by automorphic kernel summation.

mod apply;
mod field;
mod kernel;
mod ops;

pub use apply::{PreparedResolvent, Resolvent, ResolventOptions, ResolventValue};
pub use field::SurfaceField;
pub use kernel::{free_kernel, legendre_q1, GreenKernel};
pub use ops::{
    apply_resolvent, box_operator, core_probes, p1_empirical, p1_from_field, phi_field, verify_pde,
    PdeResidual,
};

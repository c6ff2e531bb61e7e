use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::apply::{Resolvent, ResolventValue};
use super::field::SurfaceField;
use crate::differentials::{pointwise_product, HarmonicBeltrami};
use crate::surface::FuchsianSurface;
use crate::{Error, Result};

/// `(□ + 1)⁻¹χ` at `z`; fails when the tail estimate exceeds the
/// configured relative tolerance.
pub fn apply_resolvent(
    resolvent: &Resolvent,
    chi: &SurfaceField,
    z: Complex64,
) -> Result<ResolventValue> {
    let v = resolvent.prepare(chi)?.eval(z);
    let tol = resolvent.options.tolerance * v.value.norm();
    if v.tail_estimate > tol {
        return Err(Error::CutoffTooSmall {
            tail: v.tail_estimate,
            tol,
        });
    }
    Ok(v)
}

/// `φ_{ij̄} = (□ + 1)⁻¹(β_i conj β_j)` on the mesh.
pub fn phi_field(
    resolvent: &Resolvent,
    a_i: &HarmonicBeltrami,
    a_j: &HarmonicBeltrami,
) -> Result<SurfaceField> {
    let mesh = &resolvent.mesh;
    if a_i.is_zero() || a_j.is_zero() {
        return Ok(SurfaceField::constant(mesh, Complex64::new(0.0, 0.0)));
    }
    let chi = pointwise_product(mesh, a_i, a_j);
    Ok(resolvent.prepare(&chi)?.into_field())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PdeResidual {
    pub probes: usize,
    pub max_relative: f64,
    pub mean_relative: f64,
    /// `|□φ + φ − χ| / (|φ| + |χ|)` per probe.
    pub relative: Vec<f64>,
}

/// `□φ = −½y²(φ_xx + φ_yy)` by a fourth-order stencil of Euclidean step
/// `h·y`.
pub fn box_operator(phi: &SurfaceField, z: Complex64, h: f64) -> Complex64 {
    let s = h * z.im;
    let f = |dx: f64, dy: f64| phi.eval(z + Complex64::new(dx, dy));
    let c = f(0.0, 0.0);
    let d2 = |e: fn(f64) -> (f64, f64)| {
        let (p1, m1, p2, m2) = (e(s), e(-s), e(2.0 * s), e(-2.0 * s));
        (-f(p2.0, p2.1) + 16.0 * f(p1.0, p1.1) - 30.0 * c + 16.0 * f(m1.0, m1.1) - f(m2.0, m2.1))
            / (12.0 * s * s)
    };
    let lap = d2(|t| (t, 0.0)) + d2(|t| (0.0, t));
    -0.5 * z.im * z.im * lap
}

/// Residual of `(□ + 1)φ = χ` at the probe points.
pub fn verify_pde(
    phi: &SurfaceField,
    chi: &SurfaceField,
    probes: &[Complex64],
    h: f64,
) -> PdeResidual {
    let relative: Vec<f64> = probes
        .iter()
        .map(|&z| {
            let p = phi.eval(z);
            let x = chi.eval(z);
            let r = box_operator(phi, z, h) + p - x;
            r.norm() / (p.norm() + x.norm()).max(f64::MIN_POSITIVE)
        })
        .collect();
    let max_relative = relative.iter().copied().fold(0.0, f64::max);
    let mean_relative = relative.iter().sum::<f64>() / relative.len().max(1) as f64;
    PdeResidual {
        probes: probes.len(),
        max_relative,
        mean_relative,
        relative,
    }
}

/// Random points of the Ford domain with frame height in `[y_lo, y_hi]`,
/// in user coordinates.
pub fn core_probes(
    surface: &FuchsianSurface,
    n: usize,
    y_lo: f64,
    y_hi: f64,
    seed: u64,
) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (x0, w) = (surface.ford.x0, surface.frame.width);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let zeta = Complex64::new(
            x0 + w * rng.gen::<f64>(),
            y_lo + (y_hi - y_lo) * rng.gen::<f64>(),
        );
        let z = surface.frame.from_frame(zeta);
        if (surface.cusp_height(z) - zeta.im).abs() < 1e-12 {
            out.push(z);
        }
    }
    out
}

/// `min φ(z) / ∫χ` over mesh nodes of frame height at most `core_height`,
/// for `φ = (□ + 1)⁻¹χ`, `χ = |β|²`.
pub fn p1_empirical(resolvent: &Resolvent, a: &HarmonicBeltrami, core_height: f64) -> Result<f64> {
    let phi = phi_field(resolvent, a, a)?;
    p1_from_field(resolvent, &phi, a, core_height)
}

pub fn p1_from_field(
    resolvent: &Resolvent,
    phi: &SurfaceField,
    a: &HarmonicBeltrami,
    core_height: f64,
) -> Result<f64> {
    let mesh = &resolvent.mesh;
    let total = mesh.integrate(|p| a.eval(p.to_complex()).norm_sqr());
    if !(total > 0.0) {
        return Err(Error::InvalidArgument("zero Beltrami differential".into()));
    }
    let min = mesh
        .nodes
        .iter()
        .zip(&phi.values)
        .filter(|(p, _)| resolvent.surface.cusp_height(p.to_complex()) <= core_height)
        .map(|(_, v)| v.re)
        .fold(f64::INFINITY, f64::min);
    if !min.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "no mesh node below height {core_height}"
        )));
    }
    Ok(min / total)
}

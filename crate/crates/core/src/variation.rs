//! First and second variations of geodesic length, the logarithmic Hessian,
//! and the inequality audits built on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differentials::{pointwise_product, sup_norm, HarmonicBeltrami};
use crate::geodesic_ops::{
    geodesic_integral, line_resolvent, m_operator, restrict_to_geodesic, PeriodicFunction,
};
use crate::hyperbolic::NormConvention;
use crate::resolvent::{p1_from_field, PreparedResolvent, Resolvent, SurfaceField};
use crate::surface::ClosedGeodesic;
use crate::{Error, Result};

pub type HermitianMatrix = DMatrix<Complex64>;

/// Tolerance of the matrix order and of Hermitian symmetry.
pub const ORDER_TOLERANCE: f64 = 1e-10;

/// Multiple of the constant-reproduction defect charged as the relative
/// quadrature error of `(□ + 1)⁻¹χ` for non-constant data.
pub const MESH_SAFETY: f64 = 10.0;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

/// `∂ℓ/∂s = ½∫_γ a`.
pub fn first_variation(gamma: &ClosedGeodesic, a: &HarmonicBeltrami) -> Result<Complex64> {
    let f = restrict_to_geodesic(a, gamma, 0, gamma.convention)?;
    Ok(0.5 * geodesic_integral(&f))
}

fn check_lengths(phi: &PeriodicFunction, a: &PeriodicFunction, b: &PeriodicFunction) -> Result<()> {
    if phi.len() != a.len() || a.len() != b.len() {
        return Err(Error::DimensionMismatch(format!(
            "sample counts {}, {}, {}",
            phi.len(),
            a.len(),
            b.len()
        )));
    }
    if (phi.period - a.period).abs() > 1e-12 * a.period
        || (a.period - b.period).abs() > 1e-12 * a.period
    {
        return Err(Error::DimensionMismatch("periods differ".into()));
    }
    Ok(())
}

/// `½∫(φ + (2 − D²)⁻¹(a_i)·conj a_j) + (1/4ℓ)∫a_i·conj∫a_j` from the
/// restrictions of `φ_{ij̄}`, `a_i`, `a_j` to the geodesic.
pub fn second_variation_from_parts(
    phi: &PeriodicFunction,
    a_i: &PeriodicFunction,
    a_j: &PeriodicFunction,
) -> Result<Complex64> {
    check_lengths(phi, a_i, a_j)?;
    let r = line_resolvent(a_i, 2.0)?;
    let l = a_i.period;
    Ok(0.5 * phi.integral()
        + 0.5 * r.inner(a_j)
        + a_i.integral() * a_j.integral().conj() / (4.0 * l))
}

/// `½∫(φ + a_i·conj a_j) − ½∫M(a_i)·conj a_j`.
pub fn second_variation_alt_from_parts(
    phi: &PeriodicFunction,
    a_i: &PeriodicFunction,
    a_j: &PeriodicFunction,
) -> Result<Complex64> {
    check_lengths(phi, a_i, a_j)?;
    let m = m_operator(a_i);
    Ok(0.5 * (phi.integral() + a_i.inner(a_j)) - 0.5 * m.inner(a_j))
}

/// `(□ + 1)⁻¹χ` sampled along the geodesic, with the largest pointwise
/// tail estimate.
pub fn phi_along(
    prepared: &PreparedResolvent,
    gamma: &ClosedGeodesic,
    n: usize,
) -> Result<(PeriodicFunction, f64)> {
    let n = if n == 0 { gamma.samples } else { n };
    let l = gamma.length;
    let vals: Vec<_> = (0..n)
        .into_par_iter()
        .map(|k| prepared.eval(gamma.sample(k as f64 * l / n as f64).point.to_complex()))
        .collect();
    let tail = vals.iter().map(|v| v.tail_estimate).fold(0.0, f64::max);
    let f = PeriodicFunction::new(l, vals.iter().map(|v| v.value).collect())?;
    Ok((f, tail))
}

/// Trapezoid integral on every other sample minus the full one.
fn halving_defect(f: &PeriodicFunction) -> f64 {
    let half: Complex64 = f.samples.iter().step_by(2).sum();
    (half * 2.0 * f.period / f.len() as f64 - f.integral()).norm()
}

/// A value with its uncertainty budget.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: Complex64,
    pub uncertainty: f64,
}

/// Sources of numerical uncertainty, each as an absolute bound on the
/// quantity it is attached to.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub poincare_tail: f64,
    pub kernel_cutoff: f64,
    pub mesh: f64,
    pub line_sampling: f64,
}

impl Budget {
    pub fn total(&self) -> f64 {
        self.poincare_tail + self.kernel_cutoff + self.mesh + self.line_sampling
    }

    fn add(&self, o: &Self) -> Self {
        Self {
            poincare_tail: self.poincare_tail + o.poincare_tail,
            kernel_cutoff: self.kernel_cutoff + o.kernel_cutoff,
            mesh: self.mesh + o.mesh,
            line_sampling: self.line_sampling + o.line_sampling,
        }
    }
}

/// The ingredients of the second variation along one geodesic for a pair
/// of directions.
#[derive(Debug, Clone)]
pub struct SecondVariationParts {
    pub phi: PeriodicFunction,
    pub a_i: PeriodicFunction,
    pub a_j: PeriodicFunction,
    /// Budget of `½∫φ`.
    pub phi_budget: Budget,
    /// Budget of the terms built from `a_i`, `a_j` only.
    pub line_budget: Budget,
}

/// Second variations over a fixed resolvent, in one norm convention.
#[derive(Debug, Clone)]
pub struct VariationEngine {
    pub resolvent: Resolvent,
    pub convention: NormConvention,
    /// Samples along each geodesic; 0 uses the geodesic's own count.
    pub samples: usize,
}

impl VariationEngine {
    pub fn new(resolvent: Resolvent, convention: NormConvention) -> Self {
        Self {
            resolvent,
            convention,
            samples: 0,
        }
    }

    fn geodesic(&self, gamma: &ClosedGeodesic) -> ClosedGeodesic {
        if gamma.convention == self.convention {
            gamma.clone()
        } else {
            gamma.with_convention(self.convention)
        }
    }

    /// Largest `|(□ + 1)⁻¹1 − 1|` over 16 points of the geodesic.
    pub fn mesh_defect(&self, gamma: &ClosedGeodesic) -> Result<f64> {
        let g = self.geodesic(gamma);
        let one = SurfaceField::constant(&self.resolvent.mesh, Complex64::new(1.0, 0.0));
        let p = self.resolvent.prepare(&one)?;
        Ok((0..16)
            .into_par_iter()
            .map(|k| {
                let z = g.sample(k as f64 * g.length / 16.0).point.to_complex();
                (p.eval(z).value - 1.0).norm()
            })
            .collect::<Vec<f64>>()
            .into_iter()
            .fold(0.0, f64::max))
    }

    pub fn parts(
        &self,
        gamma: &ClosedGeodesic,
        a_i: &HarmonicBeltrami,
        a_j: &HarmonicBeltrami,
    ) -> Result<SecondVariationParts> {
        let defect = self.mesh_defect(gamma)?;
        self.parts_with_defect(gamma, a_i, a_j, defect)
    }

    fn parts_with_defect(
        &self,
        gamma: &ClosedGeodesic,
        a_i: &HarmonicBeltrami,
        a_j: &HarmonicBeltrami,
        defect: f64,
    ) -> Result<SecondVariationParts> {
        let g = self.geodesic(gamma);
        let n = if self.samples == 0 {
            g.samples
        } else {
            self.samples
        };
        let fi = restrict_to_geodesic(a_i, &g, n, self.convention)?;
        let fj = restrict_to_geodesic(a_j, &g, n, self.convention)?;
        let (phi, tail) = if a_i.is_zero() || a_j.is_zero() {
            (PeriodicFunction::constant(g.length, n, zero())?, 0.0)
        } else {
            let chi = pointwise_product(&self.resolvent.mesh, a_i, a_j);
            phi_along(&self.resolvent.prepare(&chi)?, &g, n)?
        };
        let rb = a_i.residual_bound() + a_j.residual_bound();
        let half_phi = 0.5 * phi.integral().norm();
        let abs_phi = 0.5 * phi.samples.iter().map(|v| v.norm()).sum::<f64>() * g.length / n as f64;
        let phi_budget = Budget {
            poincare_tail: rb * half_phi,
            kernel_cutoff: 0.5 * tail * g.length,
            mesh: MESH_SAFETY * defect * abs_phi,
            line_sampling: 0.5 * halving_defect(&phi),
        };
        let prod = fi.zip_with(&fj, |x, y| x * y.conj());
        let line_scale = 0.5 * fi.norm_sqr().sqrt() * fj.norm_sqr().sqrt();
        let line_budget = Budget {
            poincare_tail: rb * line_scale,
            line_sampling: 0.5 * halving_defect(&prod)
                + (halving_defect(&fi) * fj.integral().norm()
                    + fi.integral().norm() * halving_defect(&fj))
                    / (4.0 * g.length),
            ..Budget::default()
        };
        Ok(SecondVariationParts {
            phi,
            a_i: fi,
            a_j: fj,
            phi_budget,
            line_budget,
        })
    }

    pub fn second_variation(
        &self,
        gamma: &ClosedGeodesic,
        a_i: &HarmonicBeltrami,
        a_j: &HarmonicBeltrami,
    ) -> Result<Estimate> {
        let p = self.parts(gamma, a_i, a_j)?;
        Ok(Estimate {
            value: second_variation_from_parts(&p.phi, &p.a_i, &p.a_j)?,
            uncertainty: p.phi_budget.add(&p.line_budget).total(),
        })
    }

    pub fn second_variation_alt(
        &self,
        gamma: &ClosedGeodesic,
        a_i: &HarmonicBeltrami,
        a_j: &HarmonicBeltrami,
    ) -> Result<Estimate> {
        let p = self.parts(gamma, a_i, a_j)?;
        Ok(Estimate {
            value: second_variation_alt_from_parts(&p.phi, &p.a_i, &p.a_j)?,
            uncertainty: p.phi_budget.add(&p.line_budget).total(),
        })
    }

    /// The full audit of one geodesic over a basis of directions.
    pub fn bounds_report(
        &self,
        gamma: &ClosedGeodesic,
        basis: &[HarmonicBeltrami],
    ) -> Result<VariationReport> {
        let g = self.geodesic(gamma);
        let n = basis.len();
        if n == 0 {
            return Err(Error::DimensionMismatch("empty basis".into()));
        }
        let defect = self.mesh_defect(&g)?;
        let mut h = HermitianMatrix::zeros(n, n);
        let mut h_alt = HermitianMatrix::zeros(n, n);
        let mut lower = HermitianMatrix::zeros(n, n);
        let mut phi_int = HermitianMatrix::zeros(n, n);
        let mut budget = Budget::default();
        let mut line_budget = Budget::default();
        let mut phi_diag = Vec::with_capacity(n);
        let mut a_diag = Vec::with_capacity(n);
        for i in 0..n {
            for j in 0..n {
                let p = self.parts_with_defect(&g, &basis[i], &basis[j], defect)?;
                let v = second_variation_from_parts(&p.phi, &p.a_i, &p.a_j)?;
                h[(i, j)] = v;
                h_alt[(i, j)] = second_variation_alt_from_parts(&p.phi, &p.a_i, &p.a_j)?;
                phi_int[(i, j)] = p.phi.integral();
                lower[(i, j)] = 0.5
                    * (p.phi.integral() + p.a_i.integral() * p.a_j.integral().conj() / g.length);
                budget = budget.add(&p.phi_budget).add(&p.line_budget);
                line_budget = line_budget.add(&p.line_budget);
                if i == j {
                    phi_diag.push(p.phi.clone());
                    a_diag.push(p.a_i.clone());
                }
            }
        }
        let l = g.length;
        let dl: Vec<Complex64> = a_diag.iter().map(|a| 0.5 * a.integral()).collect();
        let hlog = log_hessian(l, &dl, &h)?;
        let log_lower = HermitianMatrix::from_fn(n, n, |i, j| {
            phi_int[(i, j)] / (2.0 * l) + dl[i] * dl[j].conj() / (l * l)
        });
        let asym = asymmetry(&h);
        let mut checks = Vec::new();
        let tot = budget.total();
        let line_tot = line_budget.total();
        let margin = min_eigenvalue(&(&h - &lower));
        // Both lower bounds are attained when `a` is constant along the
        // geodesic, so they are audited as non-strict orders.
        checks.push(BoundCheck::non_strict("length_lower", margin, line_tot));
        let margin = min_eigenvalue(&(&hlog - &log_lower));
        checks.push(BoundCheck::non_strict("log_lower", margin, line_tot / l));
        checks.push(BoundCheck::new("length_positive", min_eigenvalue(&h), tot));
        checks.push(BoundCheck::new(
            "log_positive",
            min_eigenvalue(&hlog),
            tot / l,
        ));
        let mut sups = Vec::with_capacity(n);
        for (i, a) in basis.iter().enumerate() {
            let s = sup_norm(&self.resolvent.surface, &self.resolvent.mesh, a);
            let sup2 = s.value * s.value;
            let sup2_err = 2e-9 * sup2;
            checks.push(BoundCheck::new(
                &format!("length_upper[{i}]"),
                l * sup2 - h[(i, i)].re,
                tot + l * sup2_err,
            ));
            checks.push(BoundCheck::new(
                &format!("log_upper[{i}]"),
                0.75 * sup2 - hlog[(i, i)].re,
                tot / l + 0.75 * sup2_err,
            ));
            let phi_max = phi_diag[i]
                .samples
                .iter()
                .map(|v| v.re)
                .fold(f64::MIN, f64::max);
            checks.push(BoundCheck::new(
                &format!("phi_max[{i}]"),
                sup2 - phi_max,
                MESH_SAFETY * defect * phi_max + sup2_err,
            ));
            sups.push(s.value);
        }
        let (p1, p1_ratio) = self.p1_diagnostic(&g, basis, &phi_int)?;
        let route_gap = (&h - &h_alt).iter().map(|v| v.norm()).fold(0.0, f64::max);
        let scale = h.iter().map(|v| v.norm()).fold(0.0, f64::max);
        checks.push(BoundCheck {
            name: "dual_route".into(),
            margin: 1e-6 * scale - route_gap,
            budget: 0.0,
            pass: route_gap <= 1e-6 * scale,
        });
        let sym_tol = ORDER_TOLERANCE * scale.max(1.0);
        checks.push(BoundCheck {
            name: "hermitian".into(),
            margin: sym_tol - asym,
            budget: 0.0,
            pass: asym <= sym_tol,
        });
        let pass = checks.iter().all(|c| c.pass);
        Ok(VariationReport {
            word: g.word.to_string(),
            l_cl: g.l_cl,
            length: l,
            convention: self.convention,
            dl,
            h: rows(&h),
            h_alt: rows(&h_alt),
            hlog: rows(&hlog),
            lower: rows(&lower),
            log_lower: rows(&log_lower),
            sup_norms: sups,
            budget,
            mesh_defect: defect,
            p1,
            p1_ratio,
            checks,
            pass,
        })
    }

    /// Empirical `P₁` over mesh nodes no higher in the cusp than the
    /// geodesic, and `∫_γ φ_{ii} / (ℓ·G_{ii})` for comparison.
    fn p1_diagnostic(
        &self,
        g: &ClosedGeodesic,
        basis: &[HarmonicBeltrami],
        phi_int: &HermitianMatrix,
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let r = &self.resolvent;
        let top = (0..g.samples)
            .map(|k| {
                let z = g
                    .sample(k as f64 * g.length / g.samples as f64)
                    .point
                    .to_complex();
                r.surface.cusp_height(z)
            })
            .fold(0.0, f64::max);
        let mut p1 = Vec::with_capacity(basis.len());
        let mut ratio = Vec::with_capacity(basis.len());
        for (i, a) in basis.iter().enumerate() {
            let chi = pointwise_product(&r.mesh, a, a);
            let phi = r.prepare(&chi)?.into_field();
            p1.push(p1_from_field(r, &phi, a, top)?);
            ratio.push(phi_int[(i, i)].re / (g.length * chi.integrate(&r.mesh).re));
        }
        Ok((p1, ratio))
    }
}

/// One audited inequality: `pass` iff `margin > budget`, or
/// `margin ≥ −budget` for a non-strict order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundCheck {
    pub name: String,
    pub margin: f64,
    pub budget: f64,
    pub pass: bool,
}

impl BoundCheck {
    pub fn new(name: &str, margin: f64, budget: f64) -> Self {
        Self {
            name: name.to_string(),
            margin,
            budget,
            pass: margin > budget,
        }
    }

    pub fn non_strict(name: &str, margin: f64, budget: f64) -> Self {
        Self {
            name: name.to_string(),
            margin,
            budget,
            pass: margin >= -budget,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VariationReport {
    pub word: String,
    pub l_cl: f64,
    pub length: f64,
    pub convention: NormConvention,
    pub dl: Vec<Complex64>,
    pub h: Vec<Vec<Complex64>>,
    pub h_alt: Vec<Vec<Complex64>>,
    pub hlog: Vec<Vec<Complex64>>,
    /// Right side of the lower bound for `H`.
    pub lower: Vec<Vec<Complex64>>,
    /// Right side of the lower bound for the logarithmic Hessian.
    pub log_lower: Vec<Vec<Complex64>>,
    pub sup_norms: Vec<f64>,
    pub budget: Budget,
    pub mesh_defect: f64,
    /// Informational: the empirical core constant and the ratio it bounds
    /// from below when the geodesic stays in the core.
    pub p1: Vec<f64>,
    pub p1_ratio: Vec<f64>,
    pub checks: Vec<BoundCheck>,
    pub pass: bool,
}

pub fn rows(m: &HermitianMatrix) -> Vec<Vec<Complex64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn asymmetry(m: &HermitianMatrix) -> f64 {
    (m - m.adjoint())
        .iter()
        .map(|v| v.norm())
        .fold(0.0, f64::max)
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &HermitianMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    h.symmetric_eigen()
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

/// `M ⪰ N`: the smallest eigenvalue of `M − N` is at least `−1e−10`.
pub fn hermitian_order(m: &HermitianMatrix, n: &HermitianMatrix) -> Result<bool> {
    if m.shape() != n.shape() || m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch(format!(
            "{:?} vs {:?}",
            m.shape(),
            n.shape()
        )));
    }
    for x in [m, n] {
        let a = asymmetry(x);
        if a > ORDER_TOLERANCE {
            return Err(Error::NotHermitian(a));
        }
    }
    Ok(min_eigenvalue(&(m - n)) >= -ORDER_TOLERANCE)
}

/// `∂∂̄ log ℓ = H/ℓ − dℓ_i conj(dℓ_j)/ℓ²`.
pub fn log_hessian(l: f64, dl: &[Complex64], h: &HermitianMatrix) -> Result<HermitianMatrix> {
    if !(l > 0.0) {
        return Err(Error::NonPositiveLength(l));
    }
    let n = dl.len();
    if h.shape() != (n, n) {
        return Err(Error::DimensionMismatch(format!(
            "gradient of length {n}, Hessian {:?}",
            h.shape()
        )));
    }
    Ok(HermitianMatrix::from_fn(n, n, |i, j| {
        h[(i, j)] / l - dl[i] * dl[j].conj() / (l * l)
    }))
}

/// Both sides of `∂∂̄ log Σℓ_j ⪰ (1/Σℓ_k) Σ ℓ_j ∂∂̄ log ℓ_j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SumLogReport {
    pub lhs: Vec<Vec<Complex64>>,
    pub rhs: Vec<Vec<Complex64>>,
    /// Smallest eigenvalue of `lhs − rhs`.
    pub margin: f64,
    pub holds: bool,
}

pub fn sum_log_psh_check(
    lengths: &[f64],
    gradients: &[Vec<Complex64>],
    hessians: &[HermitianMatrix],
) -> Result<SumLogReport> {
    let m = lengths.len();
    if m == 0 || gradients.len() != m || hessians.len() != m {
        return Err(Error::DimensionMismatch(format!(
            "{m} lengths, {} gradients, {} Hessians",
            gradients.len(),
            hessians.len()
        )));
    }
    let n = gradients[0].len();
    if gradients.iter().any(|g| g.len() != n) || hessians.iter().any(|h| h.shape() != (n, n)) {
        return Err(Error::DimensionMismatch("inconsistent dimensions".into()));
    }
    let total: f64 = lengths.iter().sum();
    let sum_dl: Vec<Complex64> = (0..n)
        .map(|i| gradients.iter().map(|g| g[i]).sum())
        .collect();
    let sum_h = hessians
        .iter()
        .fold(HermitianMatrix::zeros(n, n), |acc, h| acc + h);
    let lhs = log_hessian(total, &sum_dl, &sum_h)?;
    let mut rhs = HermitianMatrix::zeros(n, n);
    for ((l, g), h) in lengths.iter().zip(gradients).zip(hessians) {
        rhs += log_hessian(*l, g, h)? * Complex64::new(*l / total, 0.0);
    }
    let margin = min_eigenvalue(&(&lhs - &rhs));
    let holds = hermitian_order(&lhs, &rhs)?;
    Ok(SumLogReport {
        lhs: rows(&lhs),
        rhs: rows(&rhs),
        margin,
        holds,
    })
}

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;

use super::{CuspForm, QuadDifferential};
use crate::hyperbolic::NormConvention;
use crate::resolvent::SurfaceField;
use crate::surface::{FuchsianSurface, QuadratureMesh};
use crate::{Error, Point, Result};

/// The basis of integrable holomorphic quadratic differentials; a single
/// cusp form for the once-punctured torus.
pub fn basis_quadratic(surface: &FuchsianSurface) -> Result<Vec<Arc<dyn QuadDifferential>>> {
    let q = CuspForm::new(surface)?;
    if q.coefficients.iter().all(|c| c.norm() == 0.0) {
        return Err(Error::DegenerateBasis);
    }
    Ok(vec![Arc::new(q)])
}

/// `β = Σ c_k conj(q_k) / g` with `g = 1/(2y²)`.
#[derive(Debug, Clone, Default)]
pub struct HarmonicBeltrami {
    pub terms: Vec<(Complex64, Arc<dyn QuadDifferential>)>,
}

impl HarmonicBeltrami {
    pub fn new(q: Arc<dyn QuadDifferential>) -> Self {
        Self {
            terms: vec![(Complex64::new(1.0, 0.0), q)],
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_basis(basis: &[Arc<dyn QuadDifferential>], coefficients: &[Complex64]) -> Self {
        Self {
            terms: coefficients
                .iter()
                .copied()
                .zip(basis.iter().cloned())
                .collect(),
        }
    }

    pub fn coefficients(&self) -> Vec<Complex64> {
        self.terms.iter().map(|t| t.0).collect()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, q)| (c * k, q.clone())).collect(),
        }
    }

    pub fn plus(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.iter().all(|t| t.0 == Complex64::new(0.0, 0.0))
    }

    /// The holomorphic `Σ conj(c_k) q_k(z)`, so that `β = conj(·)/g`.
    pub fn quadratic(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .filter(|t| t.0.norm() > 0.0)
            .map(|(c, q)| c.conj() * q.eval(z))
            .sum()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        2.0 * z.im * z.im * self.quadratic(z).conj()
    }

    /// `A_{z̄z̄} = conj(q)`.
    pub fn lowered(&self, z: Complex64) -> Complex64 {
        self.quadratic(z).conj()
    }

    /// `β` lowered with the metric of the given convention.
    pub fn lowered_with(&self, z: Complex64, convention: NormConvention) -> Complex64 {
        let p = Point::new(z.re, z.im).expect("upper half-plane");
        self.eval(z) * convention.lowering(&p)
    }

    pub fn residual_bound(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.1.residual_bound())
            .fold(0.0, f64::max)
    }
}

/// Values of a Beltrami coefficient `μ` at quadrature nodes with
/// hyperbolic-area weights.
#[derive(Debug, Clone)]
pub struct BeltramiSample {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub values: Vec<Complex64>,
    /// Set when the data are supported away from the cusp.
    pub compact: bool,
}

impl BeltramiSample {
    pub fn new(
        nodes: Vec<Point>,
        weights: Vec<f64>,
        values: Vec<Complex64>,
        compact: bool,
    ) -> Result<Self> {
        if nodes.len() != weights.len() || nodes.len() != values.len() {
            return Err(Error::DimensionMismatch(
                "sample arrays differ in length".into(),
            ));
        }
        if values
            .iter()
            .any(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite Beltrami value".into()));
        }
        Ok(Self {
            nodes,
            weights,
            values,
            compact,
        })
    }

    pub fn from_fn<F>(mesh: &QuadratureMesh, compact: bool, f: F) -> Result<Self>
    where
        F: Fn(Complex64) -> Complex64 + Sync + Send,
    {
        let values = mesh.nodes.par_iter().map(|p| f(p.to_complex())).collect();
        Self::new(mesh.nodes.clone(), mesh.weights.clone(), values, compact)
    }

    pub fn from_harmonic(mesh: &QuadratureMesh, a: &HarmonicBeltrami) -> Result<Self> {
        Self::from_fn(mesh, false, |z| a.eval(z))
    }

    /// `∫ μ q dx dy`.
    pub fn pairing(&self, q: &dyn QuadDifferential) -> Complex64 {
        let v: Vec<Complex64> = self
            .nodes
            .par_iter()
            .zip(&self.values)
            .map(|(p, m)| m * q.eval(p.to_complex()))
            .collect();
        v.iter()
            .zip(&self.nodes)
            .zip(&self.weights)
            .map(|((t, p), w)| t * (w * p.y * p.y))
            .sum()
    }
}

fn gram_matrix(mesh: &QuadratureMesh, basis: &[Arc<dyn QuadDifferential>]) -> DMatrix<Complex64> {
    let n = basis.len();
    let vals: Vec<Vec<Complex64>> = mesh
        .nodes
        .par_iter()
        .map(|p| basis.iter().map(|q| q.eval(p.to_complex())).collect())
        .collect();
    let mut g = DMatrix::<Complex64>::zeros(n, n);
    for (v, (p, w)) in vals.iter().zip(mesh.nodes.iter().zip(&mesh.weights)) {
        let s = 2.0 * w * p.y.powi(4);
        for j in 0..n {
            for k in 0..n {
                g[(j, k)] += v[k].conj() * v[j] * s;
            }
        }
    }
    g
}

/// Harmonic representative of `μ`: solves
/// `∫ μ q_j dx dy = Σ_k c_k ∫ conj(q_k) q_j / g dx dy`.
pub fn harmonic_projection(
    mesh: &QuadratureMesh,
    basis: &[Arc<dyn QuadDifferential>],
    mu: &BeltramiSample,
) -> Result<HarmonicBeltrami> {
    let rhs: Vec<Complex64> = basis.iter().map(|q| mu.pairing(q.as_ref())).collect();
    harmonic_from_pairings(mesh, basis, &rhs)
}

/// The harmonic Beltrami differential whose pairings `∫ β q_j dx dy` with
/// the basis are `pairings`.
pub fn harmonic_from_pairings(
    mesh: &QuadratureMesh,
    basis: &[Arc<dyn QuadDifferential>],
    pairings: &[Complex64],
) -> Result<HarmonicBeltrami> {
    if basis.is_empty() {
        return Err(Error::DegenerateBasis);
    }
    if pairings.len() != basis.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} pairings for a basis of {}",
            pairings.len(),
            basis.len()
        )));
    }
    let g = gram_matrix(mesh, basis);
    let diag = (0..basis.len()).map(|i| g[(i, i)].re).fold(0.0, f64::max);
    let rhs = DVector::from_column_slice(pairings);
    let lu = g.clone().lu();
    let det = lu.determinant().norm();
    if !(diag > 0.0) || !(det > 1e-12 * diag.powi(basis.len() as i32)) {
        return Err(Error::SingularGram);
    }
    let c = lu.solve(&rhs).ok_or(Error::SingularGram)?;
    Ok(HarmonicBeltrami::from_basis(basis, c.as_slice()))
}

/// Weil–Petersson product `∫ β_i conj(β_j) dA`.
pub fn wp_gram(mesh: &QuadratureMesh, a: &HarmonicBeltrami, b: &HarmonicBeltrami) -> Complex64 {
    mesh.integrate_complex(|p| {
        let z = p.to_complex();
        a.eval(z) * b.eval(z).conj()
    })
}

/// The field `β_i conj(β_j)`.
pub fn pointwise_product(
    mesh: &QuadratureMesh,
    a: &HarmonicBeltrami,
    b: &HarmonicBeltrami,
) -> SurfaceField {
    let (a, b) = (a.clone(), b.clone());
    SurfaceField::from_fn(mesh, move |z| a.eval(z) * b.eval(z).conj())
}

#[derive(Debug, Clone)]
pub struct SupNorm {
    /// Largest `|β|` found, after local refinement around the best nodes.
    pub value: f64,
    /// Gap between the refined maximum and the best node value.
    pub uncertainty: f64,
    pub node_max: f64,
    pub argmax: Point,
    /// `(height, max |β| on the horocycle)` in the cusp frame.
    pub cusp_ladder: Vec<(f64, f64)>,
    /// `|β|` decreases along the ladder above the height `w/π`.
    pub cusp_decay: bool,
}

fn pattern_search<F: Fn(Complex64) -> f64>(
    f: &F,
    start: Complex64,
    step0: f64,
) -> (Complex64, f64) {
    let mut z = start;
    let mut best = f(z);
    let mut step = step0;
    let dirs = [
        (1.0, 0.0),
        (-1.0, 0.0),
        (0.0, 1.0),
        (0.0, -1.0),
        (0.7, 0.7),
        (-0.7, 0.7),
        (0.7, -0.7),
        (-0.7, -0.7),
    ];
    while step > 1e-9 * z.im {
        let mut moved = false;
        for (dx, dy) in dirs {
            let c = z + Complex64::new(dx, dy) * step;
            if c.im <= 0.0 {
                continue;
            }
            let v = f(c);
            if v > best {
                best = v;
                z = c;
                moved = true;
            }
        }
        if !moved {
            step *= 0.5;
        }
    }
    (z, best)
}

/// `max |β|` over the surface.
pub fn sup_norm(surface: &FuchsianSurface, mesh: &QuadratureMesh, a: &HarmonicBeltrami) -> SupNorm {
    let f = |z: Complex64| a.eval(z).norm();
    let vals: Vec<f64> = mesh.nodes.par_iter().map(|p| f(p.to_complex())).collect();
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&i, &j| vals[j].total_cmp(&vals[i]).then(i.cmp(&j)));
    let node_max = order.first().map_or(0.0, |&i| vals[i]);
    let mut value = node_max;
    let mut argmax = order.first().map_or(Point::i(), |&i| mesh.nodes[i]);
    if node_max > 0.0 {
        let refined: Vec<(Complex64, f64)> = order
            .iter()
            .take(8)
            .map(|&i| {
                let p = mesh.nodes[i];
                pattern_search(&f, p.to_complex(), p.y * mesh.weights[i].sqrt())
            })
            .collect();
        for (z, v) in refined {
            if v > value {
                value = v;
                argmax = Point::new(z.re, z.im).expect("upper half-plane");
            }
        }
    }
    let frame = &surface.frame;
    let w = frame.width;
    let mut cusp_ladder = Vec::new();
    let mut h = surface.y_min;
    while h < mesh.y_max.min(1e3) {
        let m = (0..64)
            .map(|k| {
                let zeta = Complex64::new(frame.lo + w * (k as f64 + 0.5) / 64.0, h);
                f(frame.from_frame(zeta))
            })
            .fold(0.0, f64::max);
        cusp_ladder.push((h, m));
        h *= 1.25;
    }
    let cusp_decay = cusp_ladder
        .windows(2)
        .filter(|p| p[0].0 >= w / std::f64::consts::PI)
        .all(|p| p[1].1 <= p[0].1);
    SupNorm {
        value,
        uncertainty: value - node_max,
        node_max,
        argmax,
        cusp_ladder,
        cusp_decay,
    }
}

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::QuadDifferential;
use crate::surface::{FordDomain, FuchsianSurface};
use crate::{Error, Mobius, Result};

/// Weight-4 cusp form from its expansion `Σ a_n e^{2πinζ/w}` at the cusp,
/// with coefficients solved by collocation on a low horocycle
/// (Hejhal's method): `q(ζ) = q(ζ*) j(g, ζ)⁻⁴` for the reduction `ζ* = gζ`.
#[derive(Debug, Clone)]
pub struct CuspForm {
    pub coefficients: Vec<Complex64>,
    pub width: f64,
    conj: Mobius,
    ford: FordDomain,
    /// Relative automorphy residual on an independent horocycle.
    pub residual: f64,
    /// Two smallest singular values of the collocation system.
    pub singular_values: [f64; 2],
}

/// Truncation order so that `e^{−2π M y_min / w} < e^{−40}`.
fn default_terms(width: f64, y_min: f64) -> usize {
    ((40.0 * width / (2.0 * PI * y_min)).ceil() as usize).clamp(20, 400)
}

impl CuspForm {
    pub fn new(surface: &FuchsianSurface) -> Result<Self> {
        let m = default_terms(surface.frame.width, surface.y_min);
        Self::with_terms(surface, m, 3 * m)
    }

    /// Collocation with `m` coefficients on `points` horocycle points.
    pub fn with_terms(surface: &FuchsianSurface, m: usize, points: usize) -> Result<Self> {
        let w = surface.frame.width;
        let ford = surface.ford.clone();
        let y0 = 0.6 * surface.y_min;
        let x0 = ford.x0;
        let mut rows = DMatrix::<Complex64>::zeros(points, m);
        for r in 0..points {
            let z = Complex64::new(x0 + w * (r as f64 + 0.5) / points as f64, y0);
            let (zs, g) = ford.reduce(z);
            let j4 = (z * g.c + g.d).powi(4);
            for n in 1..=m {
                let k = Complex64::new(0.0, 2.0 * PI * n as f64 / w);
                let scale = (2.0 * PI * n as f64 * y0 / w).exp();
                rows[(r, n - 1)] = ((k * z).exp() - (k * zs).exp() / j4) * scale;
            }
        }
        let svd = rows.svd(false, true);
        let v_t = svd.v_t.ok_or(Error::DegenerateBasis)?;
        let sv = &svd.singular_values;
        let mut order: Vec<usize> = (0..sv.len()).collect();
        order.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
        let (imin, inext) = (order[0], order[1]);
        if !(sv[imin] < 1e-6 * sv[inext]) {
            return Err(Error::DegenerateBasis);
        }
        let mut coefficients: Vec<Complex64> = (0..m)
            .map(|n| v_t[(imin, n)].conj() * (2.0 * PI * (n + 1) as f64 * y0 / w).exp())
            .collect();
        let top = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
        let lead = coefficients
            .iter()
            .copied()
            .find(|c| c.norm() > 1e-8 * top)
            .ok_or(Error::DegenerateBasis)?;
        for c in &mut coefficients {
            *c /= lead;
        }
        let mut form = Self {
            coefficients,
            width: w,
            conj: surface.frame.conj,
            ford,
            residual: f64::NAN,
            singular_values: [sv[imin], sv[inext]],
        };
        form.residual = form.horocycle_residual(0.85 * surface.y_min, 97);
        Ok(form)
    }

    /// Truncated expansion at `ζ` in the cusp frame.
    pub fn series(&self, zeta: Complex64) -> Complex64 {
        let e = (Complex64::new(0.0, 2.0 * PI / self.width) * zeta).exp();
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| (acc + a) * e)
    }

    /// Value in the cusp frame, reducing first.
    pub fn eval_frame(&self, zeta: Complex64) -> Complex64 {
        let (zs, g) = self.ford.reduce(zeta);
        self.series(zs) / (zeta * g.c + g.d).powi(4)
    }

    /// Largest relative mismatch between the raw expansion and its
    /// automorphic image at points of a horocycle below the Ford floor.
    pub fn horocycle_residual(&self, y: f64, points: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for r in 0..points {
            let z = Complex64::new(
                self.ford.x0 + self.width * (r as f64 + 0.31) / points as f64,
                y,
            );
            let (zs, g) = self.ford.reduce(z);
            let direct = self.series(z);
            let image = self.series(zs) / (z * g.c + g.d).powi(4);
            worst = worst.max((direct - image).norm());
            scale = scale.max(direct.norm());
        }
        worst / scale
    }
}

impl QuadDifferential for CuspForm {
    fn eval(&self, z: Complex64) -> Complex64 {
        let c = &self.conj;
        self.eval_frame(c.apply_complex(z)) / (z * c.c + c.d).powi(4)
    }

    fn residual_bound(&self) -> f64 {
        (10.0 * self.residual).max(1e-10)
    }

    fn label(&self) -> String {
        format!("cusp form ({} terms)", self.coefficients.len())
    }
}

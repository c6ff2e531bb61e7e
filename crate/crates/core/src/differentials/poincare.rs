use std::f64::consts::PI;

use num_complex::Complex64;

use super::QuadDifferential;
use crate::surface::{ClosedGeodesic, DirichletDomain, FuchsianSurface};
use crate::{Error, Point, Result};

/// Relative Poincaré series `Θ_γ(z) = Σ ((a − b)/((z − a)(z − b)))²` over the
/// distinct translates `(a, b)` of the axis of `γ`, truncated to translates
/// within `radius` of a centre.
#[derive(Debug, Clone)]
pub struct RelativePoincareSeries {
    pub word: String,
    pub l_cl: f64,
    pub center: Point,
    pub radius: f64,
    axes: Vec<(Option<f64>, Option<f64>)>,
    dirichlet: DirichletDomain,
}

fn theta(a: Option<f64>, b: Option<f64>, z: Complex64) -> Complex64 {
    match (a, b) {
        (Some(a), Some(b)) => {
            let t = (a - b) / ((z - a) * (z - b));
            t * t
        }
        (Some(e), None) | (None, Some(e)) => (z - e).powi(2).inv(),
        (None, None) => Complex64::new(0.0, 0.0),
    }
}

impl RelativePoincareSeries {
    pub fn new(surface: &FuchsianSurface, gamma: &ClosedGeodesic, radius: f64) -> Result<Self> {
        let dirichlet = surface.dirichlet()?.clone();
        let center = dirichlet.center;
        let axes = surface
            .axis_translates(gamma, center.to_complex(), radius)
            .into_iter()
            .map(|t| t.endpoints)
            .collect();
        Ok(Self {
            word: gamma.word.to_string(),
            l_cl: gamma.l_cl,
            center,
            radius,
            axes,
            dirichlet,
        })
    }

    pub fn term_count(&self) -> usize {
        self.axes.len()
    }

    /// Truncated sum at `z` without reduction, with the tail estimate
    /// `4 L e^{−(R − d(z, centre))} / (π y²)`.
    pub fn eval_direct(&self, z: Complex64) -> (Complex64, f64) {
        let sum = self.axes.iter().map(|&(a, b)| theta(a, b, z)).sum();
        let p = Point::new(z.re, z.im).expect("upper half-plane");
        let reach = (self.radius - p.distance(&self.center)).max(0.0);
        (sum, 4.0 * self.l_cl * (-reach).exp() / (PI * z.im * z.im))
    }

    /// Value and tail estimate after reducing `z` towards the centre.
    pub fn eval_with_tail(&self, z: Complex64) -> (Complex64, f64) {
        let p = Point::new(z.re, z.im).expect("upper half-plane");
        let r = match self.dirichlet.reduce_point(p) {
            Ok(r) => r,
            Err(_) => return self.eval_direct(z),
        };
        // z = E(z*), so q(z) = q(z*) (E⁻¹)'(z)².
        let g = r.element.inverse();
        let j = (z * g.c + g.d).powi(4);
        let (v, tail) = self.eval_direct(r.point.to_complex());
        (v / j, tail / j.norm())
    }
}

impl QuadDifferential for RelativePoincareSeries {
    fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_with_tail(z).0
    }

    fn residual_bound(&self) -> f64 {
        4.0 * self.l_cl * (-self.radius).exp() / PI
    }

    fn label(&self) -> String {
        format!(
            "relative Poincaré series of {} (R = {})",
            self.word, self.radius
        )
    }
}

/// `Θ_γ(z)` with its tail estimate; fails when the estimate exceeds
/// `tolerance · |Θ_γ(z)|`.
pub fn rel_poincare_theta(
    surface: &FuchsianSurface,
    gamma: &ClosedGeodesic,
    z: Point,
    radius: f64,
    tolerance: f64,
) -> Result<(Complex64, f64)> {
    let s = RelativePoincareSeries::new(surface, gamma, radius)?;
    let (v, tail) = s.eval_with_tail(z.to_complex());
    if tail > tolerance * v.norm() {
        return Err(Error::TruncationTooSmall {
            tail,
            tol: tolerance * v.norm(),
        });
    }
    Ok((v, tail))
}

use num_complex::Complex;

use super::HPoint;
use crate::Real;

/// Fiber metric `g(z) |dz|²` with `g = 1/(2y²)`, the density of curvature
/// form solving `∂_z ∂_z̄ log g = g`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MetricDensity;

impl MetricDensity {
    pub fn g<T: Real>(&self, p: &HPoint<T>) -> T {
        (T::lit(2.0) * p.y * p.y).recip()
    }

    pub fn log_g<T: Real>(&self, p: &HPoint<T>) -> T {
        -(T::lit(2.0).ln() + T::lit(2.0) * p.y.ln())
    }

    /// Christoffel symbol `Γ = ∂_z log g = i / y`.
    pub fn christoffel<T: Real>(&self, p: &HPoint<T>) -> Complex<T> {
        Complex::new(T::zero(), p.y.recip())
    }

    /// `∂_z ∂_z̄ log g − g` from a five-point Laplacian of `log g` with step
    /// `h`, Richardson-extrapolated against step `2h`. Differences of `log g`
    /// are formed as logarithms of ratios so the stencil does not lose digits.
    pub fn curvature_defect<T: Real>(&self, p: &HPoint<T>, h: T) -> T {
        let two = T::lit(2.0);
        // log g(x, y + dy) − log g(x, y); the x-neighbours contribute zero.
        let delta = |dy: T| -two * (dy / p.y).ln_1p();
        let lap = |h: T| (delta(h) + delta(-h)) / (h * h);
        let rich = (T::lit(4.0) * lap(h) - lap(two * h)) / T::lit(3.0);
        rich / T::lit(4.0) - self.g(p)
    }
}

/// How the unit speed of a geodesic and the lowering of indices are
/// measured: `Hermitian` uses `g |u̇|² = 1`, `Riemannian` uses `2g |u̇|² = 1`.
#[derive(
    Debug, Clone, Copy, Default, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "lowercase")]
pub enum NormConvention {
    #[default]
    Hermitian,
    Riemannian,
}

impl NormConvention {
    /// Length of a closed geodesic from its classical trace length.
    pub fn length_from_classical<T: Real>(self, l_cl: T) -> T {
        match self {
            Self::Hermitian => l_cl / T::SQRT_2(),
            Self::Riemannian => l_cl,
        }
    }

    /// Euclidean speed per unit height, `|u̇| = k·y`.
    pub fn speed_factor<T: Real>(self) -> T {
        match self {
            Self::Hermitian => T::SQRT_2(),
            Self::Riemannian => T::one(),
        }
    }

    /// Metric coefficient used to lower indices: `g` or `2g`.
    pub fn lowering<T: Real>(self, p: &HPoint<T>) -> T {
        let g = MetricDensity.g(p);
        match self {
            Self::Hermitian => g,
            Self::Riemannian => T::lit(2.0) * g,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Hermitian => "hermitian",
            Self::Riemannian => "riemannian",
        }
    }
}

impl std::str::FromStr for NormConvention {
    type Err = crate::Error;
    fn from_str(s: &str) -> crate::Result<Self> {
        match s {
            "hermitian" => Ok(Self::Hermitian),
            "riemannian" => Ok(Self::Riemannian),
            other => Err(crate::Error::InvalidArgument(format!(
                "unknown convention `{other}` (expected hermitian|riemannian)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_and_christoffel() {
        let p = HPoint::new(0.3f64, 2.0).unwrap();
        assert!((MetricDensity.g(&p) - 0.125).abs() < 1e-16);
        assert!((MetricDensity.log_g(&p) - 0.125f64.ln()).abs() < 1e-15);
        // Γ against a finite difference of log g along ∂_z = (∂_x − i∂_y)/2.
        let h = 1e-5;
        let up = MetricDensity.log_g(&HPoint::new(0.3, 2.0 + h).unwrap());
        let dn = MetricDensity.log_g(&HPoint::new(0.3, 2.0 - h).unwrap());
        let dz = Complex::new(0.0, -0.5 * (up - dn) / (2.0 * h));
        assert!((MetricDensity.christoffel(&p) - dz).norm() < 1e-9);
    }

    #[test]
    fn curvature_defect_vanishes() {
        for &(x, y) in &[(0.0, 1.0), (-3.0, 0.5), (7.0, 3.0)] {
            let p: HPoint<f64> = HPoint::new(x, y).unwrap();
            assert!(MetricDensity.curvature_defect(&p, 1e-4).abs() < 1e-10);
        }
    }

    #[test]
    fn convention_parse() {
        assert_eq!(
            "riemannian".parse::<NormConvention>().unwrap(),
            NormConvention::Riemannian
        );
        assert!("kähler".parse::<NormConvention>().is_err());
    }
}

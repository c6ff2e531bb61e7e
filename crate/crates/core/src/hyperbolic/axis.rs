use num_complex::Complex;

use super::{ElementKind, HPoint, MobiusTransform, NormConvention};
use crate::{Error, Real, Result};

/// Invariant axis of a hyperbolic element together with a standardizing map
/// `S` sending `0 ↦ repelling`, `∞ ↦ attracting`, so that
/// `S⁻¹ m S = diag(e^{L/2}, e^{−L/2})`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicAxis<T> {
    pub element: MobiusTransform<T>,
    /// Boundary endpoints, `None` standing for ∞.
    pub repelling: Option<T>,
    pub attracting: Option<T>,
    pub standardizer: MobiusTransform<T>,
    /// Classical translation length `2 arccosh(|tr|/2)`.
    pub l_cl: T,
}

/// Sample of a unit-speed parametrization: position and `du/dt`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSample<T> {
    pub point: HPoint<T>,
    pub velocity: Complex<T>,
}

impl<T: Real> GeodesicAxis<T> {
    pub fn from_element(m: &MobiusTransform<T>) -> Result<Self> {
        let class = m.classify()?;
        if class.kind != ElementKind::Hyperbolic {
            return Err(Error::NotHyperbolic(m.trace().to_f64().unwrap_or(f64::NAN)));
        }
        let m = if m.trace() < T::zero() { m.neg() } else { *m };
        let two = T::lit(2.0);
        let tr = m.trace();
        let lam = (tr + (tr * tr - T::lit(4.0)).sqrt()) / two;
        let eigvec = |mu: T| -> (T, T) {
            let v1 = (m.b, mu - m.a);
            let v2 = (mu - m.d, m.c);
            if v1.0.abs() + v1.1.abs() >= v2.0.abs() + v2.1.abs() {
                v1
            } else {
                v2
            }
        };
        let (p, r) = eigvec(lam);
        let (q, s) = eigvec(lam.recip());
        let (q, s) = if p * s - q * r < T::zero() {
            (-q, -s)
        } else {
            (q, s)
        };
        let scale = (p * s - q * r).sqrt().recip();
        let standardizer =
            MobiusTransform::new_unchecked(p * scale, q * scale, r * scale, s * scale);
        let endpoint = |num: T, den: T| (den != T::zero()).then(|| num / den);
        Ok(Self {
            element: m,
            repelling: endpoint(q, s),
            attracting: endpoint(p, r),
            standardizer,
            l_cl: class.length,
        })
    }

    pub fn is_vertical(&self) -> bool {
        self.repelling.is_none() || self.attracting.is_none()
    }

    /// Point `u(t) = S(i e^{k t})` and its velocity, where `k` makes the
    /// speed one in the given convention. The period in `t` is the
    /// convention length.
    pub fn unit_speed_point(&self, t: T, convention: NormConvention) -> AxisSample<T> {
        let k: T = convention.speed_factor();
        let w = Complex::new(T::zero(), (k * t).exp());
        let s = &self.standardizer;
        let point = s.apply(&HPoint::new_unchecked(T::zero(), w.im));
        let velocity = w * k * s.derivative(w);
        AxisSample { point, velocity }
    }

    pub fn period(&self, convention: NormConvention) -> T {
        convention.length_from_classical(self.l_cl)
    }

    /// `S⁻¹ m S`, diagonal up to rounding.
    pub fn standardized_element(&self) -> MobiusTransform<T> {
        self.standardizer
            .inverse()
            .compose(&self.element)
            .compose(&self.standardizer)
    }
}

pub fn axis_standardize<T: Real>(m: &MobiusTransform<T>) -> Result<GeodesicAxis<T>> {
    GeodesicAxis::from_element(m)
}

pub fn unit_speed_point<T: Real>(
    axis: &GeodesicAxis<T>,
    t: T,
    convention: NormConvention,
) -> AxisSample<T> {
    axis.unit_speed_point(t, convention)
}

#[cfg(test)]
mod tests {
    use super::*;

    type M = MobiusTransform<f64>;

    #[test]
    fn diagonal_is_already_standard() {
        let m = M::new(2.0, 0.0, 0.0, 0.5).unwrap();
        let ax = axis_standardize(&m).unwrap();
        assert!(ax.standardizer.approx_eq_projective(&M::identity(), 1e-15));
        assert!(ax.is_vertical());
        assert_eq!(ax.repelling, Some(0.0));
        assert_eq!(ax.attracting, None);
    }

    #[test]
    fn endpoints_solve_fixed_point_quadratic() {
        let m = M::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let ax = axis_standardize(&m).unwrap();
        let d = ax.standardized_element();
        assert!(d.b.abs() < 1e-12 && d.c.abs() < 1e-12);
        assert!((d.a - (ax.l_cl / 2.0).exp()).abs() < 1e-12);
        // c z² + (d − a) z − b = z² + z − 1 = 0.
        let roots = [(-1.0 + 5f64.sqrt()) / 2.0, (-1.0 - 5f64.sqrt()) / 2.0];
        let (r, a) = (ax.repelling.unwrap(), ax.attracting.unwrap());
        for x in [r, a] {
            assert!(roots.iter().any(|q| (q - x).abs() < 1e-12));
        }
        assert!(r != a);
    }

    #[test]
    fn unit_speed_in_both_conventions() {
        let m = M::new(1.0, 1.0, 1.0, 2.0).unwrap();
        let ax = axis_standardize(&m).unwrap();
        for conv in [NormConvention::Hermitian, NormConvention::Riemannian] {
            for &t in &[-1.0, 0.0, 0.37, 2.5] {
                let s = ax.unit_speed_point(t, conv);
                let norm2 = conv.lowering(&s.point) * s.velocity.norm_sqr();
                assert!((norm2 - 1.0).abs() < 1e-12, "{conv:?} {norm2}");
            }
            // One period returns to the image under the element.
            let p0 = ax.unit_speed_point(0.2, conv).point;
            let p1 = ax.unit_speed_point(0.2 + ax.period(conv), conv).point;
            assert!(m.apply(&p0).distance(&p1) < 1e-10);
        }
    }

    #[test]
    fn parabolic_rejected() {
        let m = M::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(matches!(axis_standardize(&m), Err(Error::NotHyperbolic(_))));
    }
}

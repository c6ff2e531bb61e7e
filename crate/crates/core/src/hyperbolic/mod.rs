//! Upper-half-plane geometry.

mod axis;
mod metric;
mod mobius;
mod point;

pub use axis::{axis_standardize, unit_speed_point, AxisSample, GeodesicAxis};
pub use metric::{MetricDensity, NormConvention};
pub use mobius::{Classification, ElementKind, MobiusTransform};
pub use point::{hyp_distance, HPoint};

/// `m · p`.
pub fn mobius_apply<T: crate::Real>(m: &MobiusTransform<T>, p: &HPoint<T>) -> HPoint<T> {
    m.apply(p)
}

/// Kind and classical translation length of a non-identity element.
pub fn classify_and_length<T: crate::Real>(
    m: &MobiusTransform<T>,
) -> crate::Result<Classification<T>> {
    m.classify()
}

#[cfg(test)]
mod tests {
    use num_rational::Ratio;

    use super::*;

    type M = MobiusTransform<f64>;

    #[test]
    fn apply_examples() {
        let i = HPoint::new(0.0, 1.0).unwrap();
        assert_eq!(mobius_apply(&M::identity(), &i), i);
        let t = M::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(mobius_apply(&t, &i), HPoint::new(1.0, 1.0).unwrap());
        let s = M::new(0.0, 1.0, -1.0, 0.0).unwrap();
        let p = mobius_apply(&s, &HPoint::new(0.0, 2.0).unwrap());
        assert!(p.x.abs() < 1e-16 && (p.y - 0.5).abs() < 1e-16);
    }

    #[test]
    fn classification_examples() {
        let par = M::new(1.0, 1.0, 0.0, 1.0).unwrap().classify().unwrap();
        assert_eq!((par.kind, par.length), (ElementKind::Parabolic, 0.0));
        let dia = M::new(2.0, 0.0, 0.0, 0.5).unwrap().classify().unwrap();
        assert_eq!(dia.kind, ElementKind::Hyperbolic);
        assert!((dia.length - 2.0 * 2f64.ln()).abs() < 1e-15);
        let ell = M::new(0.0, 1.0, -1.0, 0.0).unwrap().classify().unwrap();
        assert_eq!(ell.kind, ElementKind::Elliptic);
        assert!(matches!(
            M::identity().neg().classify(),
            Err(crate::Error::IdentityElement)
        ));
    }

    #[test]
    fn modular_length_against_series() {
        // arccosh(3/2) = ln((3 + √5)/2), with the logarithm summed as a series
        // in the golden-ratio conjugate: ln φ² = 2·atanh-series of (φ²−1)/(φ²+1).
        let phi2 = (3.0 + 5f64.sqrt()) / 2.0;
        let u = (phi2 - 1.0) / (phi2 + 1.0);
        let ln: f64 = (0..60)
            .map(|k| 2.0 * u.powi(2 * k + 1) / (2 * k + 1) as f64)
            .sum();
        let c = M::new(1.0, 1.0, 1.0, 2.0).unwrap().classify().unwrap();
        assert!((c.length - 2.0 * ln).abs() < 1e-14);
    }

    #[test]
    fn exact_matrices() {
        let a = MobiusTransform::new_unchecked(1i64, 1, 1, 2);
        let b = MobiusTransform::new_unchecked(1i64, -1, -1, 2);
        let k = a * b * a.inverse() * b.inverse();
        assert_eq!(k.det(), 1);
        assert_eq!(k.trace(), -2);
        assert_eq!(a.pow(3) * a.pow(-3), MobiusTransform::identity());

        let h = |n, d| Ratio::new(n, d);
        let r = MobiusTransform::new_unchecked(h(2i64, 1), h(3, 4), h(0, 1), h(1, 2));
        assert_eq!(r.det(), h(1, 1));
        assert_eq!(r.compose(&r.inverse()), MobiusTransform::identity());
        let f = r.map(|x| *x.numer() as f64 / *x.denom() as f64);
        assert!(f.classify().is_ok());
    }

    #[test]
    fn determinant_check() {
        assert!(M::new(1.0, 1.0, 1.0, 1.0).is_err());
        let n = M::normalized(2.0, 0.0, 0.0, 2.0).unwrap();
        assert!(n.is_identity(1e-15));
    }
}

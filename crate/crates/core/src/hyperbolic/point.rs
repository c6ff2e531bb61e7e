use num_complex::Complex;

use crate::{Error, Real, Result};

/// Point of the upper half-plane, `y > 0`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct HPoint<T> {
    pub x: T,
    pub y: T,
}

impl<T: Real> HPoint<T> {
    pub fn new(x: T, y: T) -> Result<Self> {
        if !(y > T::zero()) || !x.is_finite() || !y.is_finite() {
            return Err(Error::NotInUpperHalfPlane(y.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(Self { x, y })
    }

    pub(crate) const fn new_unchecked(x: T, y: T) -> Self {
        Self { x, y }
    }

    pub fn from_complex(z: Complex<T>) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    pub fn to_complex(self) -> Complex<T> {
        Complex::new(self.x, self.y)
    }

    pub fn i() -> Self {
        Self::new_unchecked(T::zero(), T::one())
    }

    /// `cosh` of the hyperbolic distance, `1 + |z − w|² / (2 y_z y_w)`.
    pub fn cosh_distance(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        T::one() + (dx * dx + dy * dy) / (T::lit(2.0) * self.y * other.y)
    }

    /// Hyperbolic distance for the curvature −1 metric `|dz|/y`.
    pub fn distance(&self, other: &Self) -> T {
        // 2·asinh(|z−w| / (2√(y y'))) avoids the cancellation of acosh near 1.
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let chord = (dx * dx + dy * dy).sqrt() / (T::lit(2.0) * (self.y * other.y).sqrt());
        T::lit(2.0) * chord.asinh()
    }
}

pub fn hyp_distance<T: Real>(p: &HPoint<T>, q: &HPoint<T>) -> T {
    p.distance(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_lower_half_plane() {
        assert!(HPoint::new(0.0, 0.0).is_err());
        assert!(HPoint::new(0.0, -1.0).is_err());
        assert!(HPoint::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn vertical_segment() {
        let p = HPoint::new(0.0, 1.0).unwrap();
        let q = HPoint::new(0.0, 2.0).unwrap();
        assert!((p.distance(&q) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(p.distance(&p), 0.0);
    }

    #[test]
    fn along_circular_geodesic() {
        // Integrate |dz|/y along the semicircle through i and 1+2i.
        let p = HPoint::new(0.0, 1.0).unwrap();
        let q = HPoint::new(1.0, 2.0).unwrap();
        // Centre 2 on the real axis; the metric speed in the polar
        // angle θ is 1/sin θ.
        let c = 2.0f64;
        let angle = |z: &HPoint<f64>| z.y.atan2(z.x - c);
        let (a, b) = (angle(&p), angle(&q));
        let (a, b) = (a.min(b), a.max(b));
        let n = 20000;
        let h = (b - a) / n as f64;
        let s: f64 = (0..n).map(|k| h / (a + (k as f64 + 0.5) * h).sin()).sum();
        assert!((s - 1.5f64.acosh()).abs() < 1e-8, "{s}");
        assert!((p.distance(&q) - 1.5f64.acosh()).abs() < 1e-14);
    }
}

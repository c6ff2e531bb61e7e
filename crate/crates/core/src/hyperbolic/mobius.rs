use std::ops::Mul;

use num_complex::Complex;
use num_traits::{Num, One, Signed, Zero};

use super::HPoint;
use crate::{Error, Real, Result};

/// Real 2×2 matrix `[[a, b], [c, d]]` acting on the upper half-plane by
/// `z ↦ (a z + b) / (c z + d)`.
///
/// Matrix algebra only needs `Num + Copy`, so exact integer or rational
/// entries work; the geometric actions require a [`Real`] scalar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusTransform<T> {
    pub a: T,
    pub b: T,
    pub c: T,
    pub d: T,
}

/// Geometric type of a non-identity element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementKind {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Classification<T> {
    pub kind: ElementKind,
    /// Translation length `2·arccosh(|tr|/2)`; zero unless hyperbolic.
    pub length: T,
}

impl<T: Num + Copy> MobiusTransform<T> {
    /// Builds the matrix without checking the determinant.
    pub const fn new_unchecked(a: T, b: T, c: T, d: T) -> Self {
        Self { a, b, c, d }
    }

    pub fn identity() -> Self {
        Self::new_unchecked(T::one(), T::zero(), T::zero(), T::one())
    }

    pub fn det(&self) -> T {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> T {
        self.a + self.d
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new_unchecked(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    /// Adjugate; equals the inverse for unit determinant.
    pub fn inverse(&self) -> Self {
        let zero = T::zero();
        Self::new_unchecked(self.d, zero - self.b, zero - self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        let zero = T::zero();
        Self::new_unchecked(zero - self.a, zero - self.b, zero - self.c, zero - self.d)
    }

    /// `self · other · self⁻¹`
    pub fn conjugate(&self, other: &Self) -> Self {
        self.compose(other).compose(&self.inverse())
    }

    pub fn pow(&self, n: i32) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        (0..n.unsigned_abs()).fold(Self::identity(), |acc, _| acc.compose(&base))
    }

    pub fn map<U, F: Fn(T) -> U>(&self, f: F) -> MobiusTransform<U> {
        MobiusTransform {
            a: f(self.a),
            b: f(self.b),
            c: f(self.c),
            d: f(self.d),
        }
    }
}

impl<T: Num + Copy + Signed + PartialOrd> MobiusTransform<T> {
    /// Entrywise comparison up to the global sign ambiguity of PSL(2).
    pub fn approx_eq_projective(&self, other: &Self, tol: T) -> bool {
        let close = |m: &Self| {
            (m.a - other.a).abs() <= tol
                && (m.b - other.b).abs() <= tol
                && (m.c - other.c).abs() <= tol
                && (m.d - other.d).abs() <= tol
        };
        close(self) || close(&self.neg())
    }
}

impl<T: Num + Copy> Mul for MobiusTransform<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        self.compose(&rhs)
    }
}

impl<T: Real> MobiusTransform<T> {
    /// Checked constructor: rejects matrices with `|det − 1| > 1e-12·scale`.
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self> {
        let m = Self::new_unchecked(a, b, c, d);
        let scale = T::one().max(a.abs() * d.abs()).max(b.abs() * c.abs());
        let det = m.det();
        if (det - T::one()).abs() > T::lit(1e-12) * scale {
            return Err(Error::BadDeterminant(det.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(m)
    }

    /// Rescales a matrix with positive determinant to unit determinant.
    pub fn normalized(a: T, b: T, c: T, d: T) -> Result<Self> {
        let det = a * d - b * c;
        if det <= T::zero() {
            return Err(Error::BadDeterminant(det.to_f64().unwrap_or(f64::NAN)));
        }
        let s = det.sqrt().recip();
        Ok(Self::new_unchecked(a * s, b * s, c * s, d * s))
    }

    /// Hyperbolic translation along the imaginary axis by distance `t`.
    pub fn translation(t: T) -> Self {
        let h = (t / T::lit(2.0)).exp();
        Self::new_unchecked(h, T::zero(), T::zero(), h.recip())
    }

    pub fn apply(&self, p: &HPoint<T>) -> HPoint<T> {
        let w = self.apply_complex(p.to_complex());
        // Exact formula for the imaginary part keeps y > 0 under rounding.
        let den = (self.c * p.x + self.d).powi(2) + (self.c * p.y).powi(2);
        HPoint::new_unchecked(w.re, self.det() * p.y / den)
    }

    pub fn apply_complex(&self, z: Complex<T>) -> Complex<T> {
        (z * self.a + self.b) / (z * self.c + self.d)
    }

    /// Derivative `1/(cz+d)²` at `z`.
    pub fn derivative(&self, z: Complex<T>) -> Complex<T> {
        let den = z * self.c + self.d;
        (den * den).inv()
    }

    /// Image of the boundary point `x` (`None` stands for ∞).
    pub fn apply_boundary(&self, x: Option<T>) -> Option<T> {
        match x {
            None => (self.c != T::zero()).then(|| self.a / self.c),
            Some(x) => {
                let den = self.c * x + self.d;
                (den != T::zero()).then(|| (self.a * x + self.b) / den)
            }
        }
    }

    /// Trace classification with tolerance band `1e-10` around `|tr| = 2`.
    pub fn classify(&self) -> Result<Classification<T>> {
        let tol = T::lit(1e-10);
        let two = T::lit(2.0);
        if self.approx_eq_projective(&Self::identity(), tol) {
            return Err(Error::IdentityElement);
        }
        let tr = self.trace().abs();
        let (kind, length) = if (tr - two).abs() <= tol {
            (ElementKind::Parabolic, T::zero())
        } else if tr < two {
            (ElementKind::Elliptic, T::zero())
        } else {
            (ElementKind::Hyperbolic, two * (tr / two).acosh())
        };
        Ok(Classification { kind, length })
    }

    pub fn is_identity(&self, tol: T) -> bool {
        self.approx_eq_projective(&Self::identity(), tol)
    }

    /// Fixed points on the boundary: real roots of `c z² + (d − a) z − b = 0`,
    /// `None` standing for ∞.
    pub fn boundary_fixed_points(&self) -> Vec<Option<T>> {
        let two = T::lit(2.0);
        if self.c == T::zero() {
            let mut out = vec![None];
            if self.d != self.a {
                out.push(Some(self.b / (self.d - self.a)));
            }
            return out;
        }
        let disc = (self.d - self.a).powi(2) + T::lit(4.0) * self.b * self.c;
        if disc < T::zero() {
            return Vec::new();
        }
        let s = disc.sqrt();
        let r1 = (self.a - self.d + s) / (two * self.c);
        let r2 = (self.a - self.d - s) / (two * self.c);
        if s == T::zero() {
            vec![Some(r1)]
        } else {
            vec![Some(r1), Some(r2)]
        }
    }
}

impl<T: Num + Copy + Zero + One> Default for MobiusTransform<T> {
    fn default() -> Self {
        Self::identity()
    }
}

use num_complex::Complex64;

use crate::{Mobius, Result};

/// Coordinates in which the cusp of `K = A B A⁻¹ B⁻¹` sits at ∞.
///
/// In the frame `ζ = C z` the ideal quadrilateral with vertices
/// `P0 = A⁻¹∞`, `P1 = A⁻¹B⁻¹∞`, `P2 = B⁻¹∞`, `P3 = ∞` is a fundamental
/// domain; `A` maps side `P0P1` to `P3P2`, `B` maps `P1P2` to `P0P3`.
#[derive(Debug, Clone)]
pub struct CuspFrame {
    pub conj: Mobius,
    pub a: Mobius,
    pub b: Mobius,
    pub width: f64,
    pub verts: [f64; 3],
    /// +1 when `P0 < P1 < P2`, −1 when decreasing.
    pub orientation: f64,
    pub lo: f64,
    pub hi: f64,
    circle01: (f64, f64),
    circle12: (f64, f64),
}

const REDUCE_CAP: usize = 100_000;

impl CuspFrame {
    pub fn new(a: &Mobius, b: &Mobius) -> Result<Self> {
        let k = a.compose(b).compose(&a.inverse()).compose(&b.inverse());
        let scale = k.a.abs().max(k.d.abs()).max(1.0);
        let conj = if k.c.abs() <= 1e-14 * scale {
            Mobius::identity()
        } else {
            Mobius::new_unchecked(0.0, 1.0, -1.0, (k.a - k.d) / (2.0 * k.c))
        };
        let ci = conj.inverse();
        let (ac, bc) = (conj.compose(a).compose(&ci), conj.compose(b).compose(&ci));
        let kc = conj.compose(&k).compose(&ci);
        let width = (kc.b / kc.d).abs();
        let at_inf = |g: Mobius| g.a / g.c;
        let verts = [
            at_inf(ac.inverse()),
            at_inf(ac.inverse().compose(&bc.inverse())),
            at_inf(bc.inverse()),
        ];
        let [p0, p1, p2] = verts;
        let orientation = if p0 < p1 && p1 < p2 {
            1.0
        } else if p0 > p1 && p1 > p2 {
            -1.0
        } else {
            return Err(crate::Error::NotPuncturedTorus(k.trace()));
        };
        Ok(Self {
            conj,
            a: ac,
            b: bc,
            width,
            verts,
            orientation,
            lo: p0.min(p2),
            hi: p0.max(p2),
            circle01: ((p0 + p1) / 2.0, (p1 - p0).abs() / 2.0),
            circle12: ((p1 + p2) / 2.0, (p2 - p1).abs() / 2.0),
        })
    }

    pub fn to_frame(&self, z: Complex64) -> Complex64 {
        self.conj.apply_complex(z)
    }

    pub fn from_frame(&self, zeta: Complex64) -> Complex64 {
        self.conj.inverse().apply_complex(zeta)
    }

    /// Reduces `ζ` into the ideal quadrilateral; returns `(g ζ, g)`.
    pub fn reduce_quad(&self, zeta: Complex64) -> (Complex64, Mobius) {
        let [p0, _, p2] = self.verts;
        let mut z = zeta;
        let mut g = Mobius::identity();
        let n = ((z.re - (self.lo + self.hi) / 2.0) / self.width + 0.5).floor();
        if n != 0.0 {
            let t = Mobius::new_unchecked(1.0, -n * self.width, 0.0, 1.0);
            z = t.apply_complex(z);
            g = t;
        }
        let (ai, bi) = (self.a.inverse(), self.b.inverse());
        let incr = p2 > p0;
        for _ in 0..REDUCE_CAP {
            let h = if (z - self.circle01.0).norm() < self.circle01.1 {
                self.a
            } else if (z - self.circle12.0).norm() < self.circle12.1 {
                self.b
            } else if (incr && z.re > p2) || (!incr && z.re < p2) {
                ai
            } else if (incr && z.re < p0) || (!incr && z.re > p0) {
                bi
            } else {
                break;
            };
            z = h.apply_complex(z);
            g = h.compose(&g);
        }
        (z, g)
    }

    /// A point inside the quadrilateral.
    pub fn interior_point(&self) -> Complex64 {
        Complex64::new(self.verts[1], self.circle01.1.max(self.circle12.1))
    }

    pub fn inside_quad(&self, z: Complex64) -> bool {
        let eps = 1e-12 * (1.0 + z.norm());
        z.re >= self.lo - eps
            && z.re <= self.hi + eps
            && (z - self.circle01.0).norm() >= self.circle01.1 - eps
            && (z - self.circle12.0).norm() >= self.circle12.1 - eps
    }
}

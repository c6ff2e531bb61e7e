use std::sync::OnceLock;

use num_complex::Complex64;

use super::dirichlet::DirichletDomain;
use super::enumerate::{GroupTable, DEFAULT_BUDGET};
use super::ford::FordDomain;
use super::frame::CuspFrame;
use super::word::Letter;
use crate::{Error, Mobius, Point, Result};

/// Default bound for the cached word enumeration.
pub const DEFAULT_MAX_WORD_LEN: usize = 12;

/// Hyperbolic once-punctured torus `H/⟨A, B⟩` with `[A, B]` parabolic.
#[derive(Debug)]
pub struct FuchsianSurface {
    pub a: Mobius,
    pub b: Mobius,
    pub frame: CuspFrame,
    pub ford: FordDomain,
    /// Lowest height of the Ford domain in the cusp frame.
    pub y_min: f64,
    /// Fenchel–Nielsen parameters when built from them.
    pub fn_params: Option<(f64, f64)>,
    max_word_len: usize,
    budget: usize,
    table: OnceLock<std::result::Result<GroupTable, Error>>,
    dirichlet: OnceLock<std::result::Result<DirichletDomain, Error>>,
}

impl Clone for FuchsianSurface {
    fn clone(&self) -> Self {
        let mut s = Self::from_generators(self.a, self.b).expect("validated generators");
        s.fn_params = self.fn_params;
        s.max_word_len = self.max_word_len;
        s.budget = self.budget;
        s
    }
}

impl FuchsianSurface {
    /// Validates the commutator trace (−2 within 1e-8) and sets up the cusp
    /// frame.
    pub fn from_generators(a: Mobius, b: Mobius) -> Result<Self> {
        for m in [&a, &b] {
            Mobius::new(m.a, m.b, m.c, m.d)?;
        }
        let k = a.compose(&b).compose(&a.inverse()).compose(&b.inverse());
        if (k.trace() + 2.0).abs() > 1e-8 {
            return Err(Error::NotPuncturedTorus(k.trace()));
        }
        let frame = CuspFrame::new(&a, &b)?;
        let ford = FordDomain::new(&a, &b, &frame.conj, frame.lo, frame.width)?;
        let y_min = ford.min_height();
        Ok(Self {
            a,
            b,
            frame,
            ford,
            y_min,
            fn_params: None,
            max_word_len: DEFAULT_MAX_WORD_LEN,
            budget: DEFAULT_BUDGET,
            table: OnceLock::new(),
            dirichlet: OnceLock::new(),
        })
    }

    /// The modular torus `A = [[1,1],[1,2]]`, `B = [[1,−1],[−1,2]]`.
    pub fn modular() -> Self {
        Self::from_generators(
            Mobius::new_unchecked(1.0, 1.0, 1.0, 2.0),
            Mobius::new_unchecked(1.0, -1.0, -1.0, 2.0),
        )
        .expect("modular preset is a punctured torus")
    }

    /// Enumeration bound and element budget used by [`Self::table`].
    pub fn with_enumeration(mut self, max_word_len: usize, budget: usize) -> Self {
        self.max_word_len = max_word_len;
        self.budget = budget;
        self.table = OnceLock::new();
        self.dirichlet = OnceLock::new();
        self
    }

    pub fn max_word_len(&self) -> usize {
        self.max_word_len
    }

    /// Cached enumeration up to the configured word bound.
    pub fn table(&self) -> Result<&GroupTable> {
        self.table
            .get_or_init(|| GroupTable::build(&self.a, &self.b, self.max_word_len, self.budget))
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Like [`Self::table`], but reads the enumeration from a binary cache
    /// file when it matches, writing one otherwise.
    pub fn table_cached(&self, path: &std::path::Path) -> Result<&GroupTable> {
        self.table
            .get_or_init(|| {
                GroupTable::load_or_build(path, &self.a, &self.b, self.max_word_len, self.budget)
            })
            .as_ref()
            .map_err(Clone::clone)
    }

    /// Dirichlet domain about [`Self::default_center`].
    pub fn dirichlet(&self) -> Result<&DirichletDomain> {
        self.dirichlet
            .get_or_init(|| DirichletDomain::new(self, self.default_center()))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub fn commutator(&self) -> Mobius {
        self.a
            .compose(&self.b)
            .compose(&self.a.inverse())
            .compose(&self.b.inverse())
    }

    pub fn generator(&self, l: Letter) -> Mobius {
        l.matrix(&self.a, &self.b)
    }

    /// An interior point of the fundamental quadrilateral, in user
    /// coordinates.
    pub fn default_center(&self) -> Point {
        let z = self.frame.from_frame(self.frame.interior_point());
        Point::from_complex(z).expect("frame maps H to H")
    }

    /// Quadrilateral vertices `V0..V3` in user coordinates (`None` = ∞).
    pub fn vertices(&self) -> [Option<f64>; 4] {
        let ci = self.frame.conj.inverse();
        let [p0, p1, p2] = self.frame.verts;
        [
            ci.apply_boundary(Some(p0)),
            ci.apply_boundary(Some(p1)),
            ci.apply_boundary(Some(p2)),
            ci.apply_boundary(None),
        ]
    }

    /// Side of the quadrilateral across which the neighbouring tile `h F`
    /// lies.
    pub fn side(&self, h: Letter) -> (Option<f64>, Option<f64>) {
        let v = self.vertices();
        match h {
            Letter::A => (v[2], v[3]),
            Letter::AInv => (v[0], v[1]),
            Letter::B => (v[0], v[3]),
            Letter::BInv => (v[1], v[2]),
        }
    }

    /// Moves `z` into the Ford domain; returns `(g z, g)` with `g ∈ Γ` in
    /// user coordinates.
    pub fn reduce(&self, z: Complex64) -> (Complex64, Mobius) {
        let (zeta, gc) = self.ford.reduce(self.frame.to_frame(z));
        let c = self.frame.conj;
        (
            self.frame.from_frame(zeta),
            c.inverse().compose(&gc).compose(&c),
        )
    }

    /// Height of `z` in the cusp: the largest imaginary part over its orbit
    /// in the cusp frame. A function on the surface, at least `y_min`.
    pub fn cusp_height(&self, z: Complex64) -> f64 {
        self.ford.reduce(self.frame.to_frame(z)).0.im
    }

    /// Like [`Self::reduce`] but into the ideal quadrilateral itself.
    pub fn reduce_quad(&self, z: Complex64) -> (Complex64, Mobius) {
        let (zeta, gc) = self.frame.reduce_quad(self.frame.to_frame(z));
        let c = self.frame.conj;
        (
            self.frame.from_frame(zeta),
            c.inverse().compose(&gc).compose(&c),
        )
    }
}

/// Translation by `t` along the imaginary axis, `diag(e^{t/2}, e^{−t/2})`.
fn shift(t: f64) -> Mobius {
    Mobius::translation(t)
}

/// Fenchel–Nielsen construction: `A` translates by `ℓ_α` along the imaginary
/// axis; `B` is the symmetric partner for `τ = 0`, twisted as
/// `B_τ = T_{τ/2} B₀ T_{τ/2}`.
pub fn punctured_torus_from_fn(l_alpha: f64, tau: f64) -> Result<FuchsianSurface> {
    if !(l_alpha >= 1e-6) || !tau.is_finite() {
        return Err(Error::DegenerateLength(l_alpha));
    }
    let (a, b) = fn_generators(l_alpha, tau);
    let mut s = FuchsianSurface::from_generators(a, b)?;
    s.fn_params = Some((l_alpha, tau));
    Ok(s)
}

/// Generator pair of [`punctured_torus_from_fn`] without building the frame.
pub fn fn_generators(l_alpha: f64, tau: f64) -> (Mobius, Mobius) {
    let lam = (l_alpha / 2.0).exp();
    let x = lam + lam.recip();
    let y = x / (x - 2.0).sqrt();
    let s = (l_alpha / 2.0).sinh().recip();
    let a = Mobius::new_unchecked(lam, 0.0, 0.0, lam.recip());
    let b0 = Mobius::new_unchecked(y / (lam + 1.0), s, s, y * lam / (lam + 1.0));
    let t = shift(tau / 2.0);
    (a, t.compose(&b0).compose(&t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fn_traces() {
        for &(l, tau) in &[(0.5, 0.0), (1.7, 0.3), (3.0, -1.2)] {
            let s = punctured_torus_from_fn(l, tau).unwrap();
            assert!((s.a.trace() - 2.0 * (l / 2.0f64).cosh()).abs() < 1e-12);
            assert!((s.commutator().trace() + 2.0).abs() < 1e-8);
            assert!((s.b.det() - 1.0).abs() < 1e-12);
        }
        assert!(matches!(
            punctured_torus_from_fn(1e-7, 0.0),
            Err(Error::DegenerateLength(_))
        ));
    }

    #[test]
    fn modular_frame() {
        let s = FuchsianSurface::modular();
        assert!((s.frame.width - 6.0).abs() < 1e-12);
        assert!((s.y_min - 3f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((s.ford.area() - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        // Unit isometric circles about the integers, cut by the strip edges.
        assert!(s.ford.arcs.iter().all(|a| (a.radius - 1.0).abs() < 1e-12));
    }

    #[test]
    fn reduction_lands_in_domain() {
        let s = punctured_torus_from_fn(1.7, 0.3).unwrap();
        for k in 0..50 {
            let z = Complex64::new(-3.0 + 0.13 * k as f64, 0.01 + 0.02 * k as f64);
            let (zq, g) = s.reduce_quad(z);
            assert!((g.apply_complex(z) - zq).norm() < 1e-9 * (1.0 + zq.norm()));
            assert!(s.frame.inside_quad(s.frame.to_frame(zq)));
        }
    }
}

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::differentials::{
    harmonic_from_pairings, BeltramiSample, HarmonicBeltrami, QuadDifferential,
};
use crate::hyperbolic::NormConvention;
use crate::quadrature::gauss_legendre_on;
use crate::surface::{
    fn_generators, geodesic_representative, punctured_torus_from_fn, ClosedGeodesic,
    FuchsianSurface, QuadratureMesh, Word,
};
use crate::variation::first_variation;
use crate::{Error, Mobius, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FnDirection {
    Length,
    Twist,
}

impl FnDirection {
    pub fn name(self) -> &'static str {
        match self {
            Self::Length => "length",
            Self::Twist => "twist",
        }
    }
}

/// One-parameter Fenchel–Nielsen family through `(ℓ_α, τ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FnFamily {
    pub l_alpha: f64,
    pub tau: f64,
    pub direction: FnDirection,
    pub convention: NormConvention,
    /// `+1` or `−1`: which way along the parameter the family runs.
    pub orientation: f64,
    pub h0: f64,
}

/// Relative agreement required between the two coarsest difference quotients.
pub const FD_TOLERANCE: f64 = 1e-3;
const GENERATOR_STEP: f64 = 1e-4;

impl FnFamily {
    pub fn new(
        l_alpha: f64,
        tau: f64,
        direction: FnDirection,
        convention: NormConvention,
    ) -> Result<Self> {
        if !(l_alpha > 0.0) || !l_alpha.is_finite() {
            return Err(Error::DegenerateLength(l_alpha));
        }
        if !tau.is_finite() {
            return Err(Error::InvalidArgument(format!("twist {tau}")));
        }
        Ok(Self {
            l_alpha,
            tau,
            direction,
            convention,
            orientation: 1.0,
            h0: 1e-3 * l_alpha.max(1.0),
        })
    }

    pub fn with_step(mut self, h0: f64) -> Result<Self> {
        if !(h0 > 0.0) {
            return Err(Error::InvalidArgument(format!("step {h0}")));
        }
        self.h0 = h0;
        Ok(self)
    }

    pub fn reversed(mut self) -> Self {
        self.orientation = -self.orientation;
        self
    }

    /// `h₀, h₀/2, h₀/4`.
    pub fn steps(&self) -> [f64; 3] {
        [self.h0, self.h0 / 2.0, self.h0 / 4.0]
    }

    pub fn params(&self, s: f64) -> (f64, f64) {
        let s = self.orientation * s;
        match self.direction {
            FnDirection::Length => (self.l_alpha + s, self.tau),
            FnDirection::Twist => (self.l_alpha, self.tau + s),
        }
    }

    pub fn generators(&self, s: f64) -> (Mobius, Mobius) {
        let (l, t) = self.params(s);
        fn_generators(l, t)
    }

    pub fn base(&self) -> Result<FuchsianSurface> {
        punctured_torus_from_fn(self.l_alpha, self.tau)
    }

    /// Surfaces at `±h` for every step, checked for the commutator trace.
    pub fn members(&self) -> Result<Vec<(f64, FuchsianSurface)>> {
        let offsets: Vec<f64> = self.steps().iter().flat_map(|h| [-h, *h]).collect();
        offsets
            .par_iter()
            .map(|&s| {
                let (l, t) = self.params(s);
                let surface = punctured_torus_from_fn(l, t)?;
                let tr = surface.commutator().trace();
                if (tr + 2.0).abs() > 1e-8 {
                    return Err(Error::NotPuncturedTorus(tr));
                }
                Ok((s, surface))
            })
            .collect()
    }

    /// Length of the class of `w` in the family's convention at offset `s`.
    pub fn length(&self, w: &Word, s: f64) -> Result<f64> {
        let (a, b) = self.generators(s);
        let tr = w.eval(&a, &b).trace().abs();
        if !(tr > 2.0) {
            return Err(Error::NotHyperbolic(tr));
        }
        let l_cl = 2.0 * (tr / 2.0).acosh();
        Ok(self.convention.length_from_classical(l_cl))
    }

    /// Derivatives of the generators along the family.
    pub fn generator_derivatives(&self) -> ([f64; 4], [f64; 4]) {
        let h = GENERATOR_STEP;
        let quotient = |h: f64| {
            let (ap, bp) = self.generators(h);
            let (am, bm) = self.generators(-h);
            let d = |p: Mobius, m: Mobius| {
                let (p, m) = (entries(&p), entries(&m));
                std::array::from_fn(|k| (p[k] - m[k]) / (2.0 * h))
            };
            (d(ap, am), d(bp, bm))
        };
        let (c, f) = (quotient(h), quotient(h / 2.0));
        let rich = |c: [f64; 4], f: [f64; 4]| -> [f64; 4] {
            std::array::from_fn(|k| (4.0 * f[k] - c[k]) / 3.0)
        };
        (rich(c.0, f.0), rich(c.1, f.1))
    }
}

fn entries(m: &Mobius) -> [f64; 4] {
    [m.a, m.b, m.c, m.d]
}

fn mat_mul(x: [f64; 4], y: [f64; 4]) -> [f64; 4] {
    [
        x[0] * y[0] + x[1] * y[2],
        x[0] * y[1] + x[1] * y[3],
        x[2] * y[0] + x[3] * y[2],
        x[2] * y[1] + x[3] * y[3],
    ]
}

/// Flow field `b + (a − d) z − c z²` of `exp(sN)`.
fn flow_field(n: [f64; 4], z: Complex64) -> Complex64 {
    n[1] + (n[0] - n[3]) * z - n[2] * z * z
}

/// `∫ f(z) dz` along the geodesic from `u` to `v` (both real).
fn geodesic_line_integral<F: Fn(Complex64) -> Complex64>(f: F, u: f64, v: f64) -> Complex64 {
    const T: f64 = 8.0;
    const N: usize = 4000;
    let m = if v > u {
        [v, u, 1.0, 1.0]
    } else {
        [v, -u, 1.0, -1.0]
    };
    let det = m[0] * m[3] - m[1] * m[2];
    let h = 2.0 * T / N as f64;
    (0..=N)
        .map(|k| {
            let t = -T + h * k as f64;
            let zeta = Complex64::new(0.0, t.exp());
            let den = m[2] * zeta + m[3];
            let z = (m[0] * zeta + m[1]) / den;
            let w = if k == 0 || k == N { 0.5 } else { 1.0 };
            w * f(z) * det / (den * den) * zeta
        })
        .sum::<Complex64>()
        * h
}

/// `∫_F μ q dx dy` for the Kodaira–Spencer class of the family direction,
/// computed from the side-pairing cocycle `g⁻¹ ġ` in the cusp frame.
pub fn cocycle_pairing(
    surface: &FuchsianSurface,
    da: [f64; 4],
    db: [f64; 4],
    q: &dyn QuadDifferential,
) -> Complex64 {
    let frame = &surface.frame;
    let (c, ci) = (entries(&frame.conj), entries(&frame.conj.inverse()));
    let to_frame = |g: &Mobius, dg: [f64; 4]| {
        let n = mat_mul(entries(&g.inverse()), dg);
        mat_mul(mat_mul(c, n), ci)
    };
    let (na, nb) = (to_frame(&surface.a, da), to_frame(&surface.b, db));
    let cinv = frame.conj.inverse();
    let q_frame = |zeta: Complex64| {
        let d = cinv.derivative(zeta);
        q.eval(cinv.apply_complex(zeta)) * d * d
    };
    let [p0, p1, p2] = frame.verts;
    let ia = geodesic_line_integral(|z| flow_field(na, z) * q_frame(z), p0, p1);
    let ib = geodesic_line_integral(|z| flow_field(nb, z) * q_frame(z), p1, p2);
    frame.orientation * (-ia - ib) / Complex64::new(0.0, 2.0)
}

/// Harmonic Beltrami differential of the family direction at its base.
pub fn family_direction(
    family: &FnFamily,
    surface: &FuchsianSurface,
    mesh: &QuadratureMesh,
    basis: &[Arc<dyn QuadDifferential>],
) -> Result<HarmonicBeltrami> {
    let (da, db) = family.generator_derivatives();
    let rhs: Vec<Complex64> = basis
        .iter()
        .map(|q| cocycle_pairing(surface, da, db, q.as_ref()))
        .collect();
    harmonic_from_pairings(mesh, basis, &rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ramp {
    Cosine,
    Smootherstep,
    Zero,
}

impl Ramp {
    /// Derivative of the ramp on `[0, 1]`.
    fn slope(self, u: f64) -> f64 {
        match self {
            Self::Cosine => 0.5 * PI * (PI * u).sin(),
            Self::Smootherstep => 30.0 * u * u * (1.0 - u) * (1.0 - u),
            Self::Zero => 0.0,
        }
    }
}

/// Half-width `w` of the standard collar: `sinh w · sinh(ℓ/2) = 1`.
pub fn collar_bound(l_cl: f64) -> f64 {
    (1.0 / (l_cl / 2.0).sinh()).asinh()
}

pub fn default_half_width(l_cl: f64) -> f64 {
    0.4 * collar_bound(l_cl)
}

/// Shear Beltrami coefficient supported in a collar about `α`.
#[derive(Debug, Clone)]
pub struct TwistBeltrami {
    pub sample: BeltramiSample,
    pub half_width: f64,
    pub ramp: Ramp,
    pub rate: f64,
}

impl TwistBeltrami {
    pub fn project(
        &self,
        mesh: &QuadratureMesh,
        basis: &[Arc<dyn QuadDifferential>],
    ) -> Result<HarmonicBeltrami> {
        let rhs: Vec<Complex64> = basis
            .iter()
            .map(|q| self.sample.pairing(q.as_ref()))
            .collect();
        harmonic_from_pairings(mesh, basis, &rhs)
    }
}

pub fn twist_beltrami(
    surface: &FuchsianSurface,
    alpha: &ClosedGeodesic,
    half_width: f64,
) -> Result<TwistBeltrami> {
    twist_beltrami_with(surface, alpha, half_width, Ramp::Cosine, 1.0)
}

/// Unit twist rate shears the collar by one unit of classical length.
pub fn twist_beltrami_with(
    _surface: &FuchsianSurface,
    alpha: &ClosedGeodesic,
    half_width: f64,
    ramp: Ramp,
    rate: f64,
) -> Result<TwistBeltrami> {
    let bound = collar_bound(alpha.l_cl);
    if !(half_width > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "collar half-width {half_width}"
        )));
    }
    if half_width >= bound {
        return Err(Error::CollarTooWide {
            requested: half_width,
            bound,
        });
    }
    const NT: usize = 64;
    const NTH: usize = 64;
    let th_w = (1.0 / half_width.cosh()).asin();
    let span = PI - 2.0 * th_w;
    let dt = alpha.l_cl / NT as f64;
    let s = alpha.axis.standardizer;
    let thetas: Vec<(f64, f64)> = gauss_legendre_on(NTH, th_w, PI - th_w).collect();
    let mut nodes = Vec::with_capacity(NT * NTH);
    let mut weights = Vec::with_capacity(NT * NTH);
    let mut values = Vec::with_capacity(NT * NTH);
    for k in 0..NT {
        let r = (dt * k as f64).exp();
        for &(th, w) in &thetas {
            let zeta = Complex64::from_polar(r, th);
            let z = s.apply_complex(zeta);
            let d = s.derivative(zeta);
            // The shear increases from the attracting side towards the repelling one.
            let slope = -ramp.slope((th - th_w) / span) / span;
            let mu_std =
                Complex64::new(0.0, 0.5 * rate * slope) * Complex64::from_polar(1.0, 2.0 * th);
            nodes.push(Point::new(z.re, z.im)?);
            weights.push(dt * w / (th.sin() * th.sin()));
            values.push(mu_std * d / d.conj());
        }
    }
    Ok(TwistBeltrami {
        sample: BeltramiSample::new(nodes, weights, values, true)?,
        half_width,
        ramp,
        rate,
    })
}

/// Richardson-extrapolated derivative of a geodesic length along a family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FdDerivative {
    pub d1: f64,
    /// Observed convergence order; `None` when the quotients agree to
    /// rounding.
    pub order_estimate: Option<f64>,
    pub quotients: [f64; 3],
}

pub fn fd_length_derivative(family: &FnFamily, w: &Word) -> Result<FdDerivative> {
    let steps = family.steps();
    let mut quotients = [0.0; 3];
    let mut scale: f64 = 0.0;
    for (q, &h) in quotients.iter_mut().zip(&steps) {
        let (p, m) = (family.length(w, h)?, family.length(w, -h)?);
        scale = scale.max(p.abs()).max(m.abs());
        *q = (p - m) / (2.0 * h);
    }
    let [d0, d1, d2] = quotients;
    if (d0 - d1).abs() > FD_TOLERANCE * d1.abs() + 1e-12 {
        return Err(Error::NonconvergentFd {
            coarse: d0,
            fine: d1,
        });
    }
    let noise = 1e2 * f64::EPSILON * scale.max(1.0) / steps[2];
    let (e0, e1) = ((d0 - d1).abs(), (d1 - d2).abs());
    let order_estimate = (e1 > noise && e0 > noise).then(|| (e0 / e1).log2());
    Ok(FdDerivative {
        d1: (4.0 * d2 - d1) / 3.0,
        order_estimate,
        quotients,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GardinerReport {
    pub word: String,
    pub direction: FnDirection,
    pub convention: NormConvention,
    /// `2 Re` of the first variation along the harmonic direction.
    pub formula: f64,
    pub fd: f64,
    pub order_estimate: Option<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
    pub pass: bool,
}

pub const GARDINER_REL_TOL: f64 = 1e-3;
pub const GARDINER_ABS_TOL: f64 = 1e-6;

pub fn gardiner_check(
    family: &FnFamily,
    surface: &FuchsianSurface,
    w: &Word,
    a_dir: &HarmonicBeltrami,
) -> Result<GardinerReport> {
    let gamma = geodesic_representative(surface, w, 0, family.convention)?;
    let formula = 2.0 * first_variation(&gamma, a_dir)?.re;
    let fd = fd_length_derivative(family, w)?;
    let abs_error = (formula - fd.d1).abs();
    let rel_error = abs_error / fd.d1.abs().max(f64::MIN_POSITIVE);
    let pass = if fd.d1.abs() < GARDINER_ABS_TOL {
        abs_error < GARDINER_ABS_TOL
    } else {
        rel_error < GARDINER_REL_TOL
    };
    Ok(GardinerReport {
        word: w.to_string(),
        direction: family.direction,
        convention: family.convention,
        formula,
        fd: fd.d1,
        order_estimate: fd.order_estimate,
        abs_error,
        rel_error,
        pass,
    })
}

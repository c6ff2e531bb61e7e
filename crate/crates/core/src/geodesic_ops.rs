//! Periodic functions along closed geodesics and the line operators
//! `(−D² + c)⁻¹` and `M = 1 − (2 − D²)⁻¹` on mean-free functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::differentials::HarmonicBeltrami;
use crate::hyperbolic::NormConvention;
use crate::surface::ClosedGeodesic;
use crate::{Error, Result};

/// Samples `f(t_k)`, `t_k = kℓ/N`, of an `ℓ`-periodic function.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicFunction {
    pub period: f64,
    pub samples: Vec<Complex64>,
}

impl PeriodicFunction {
    pub fn new(period: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !(period > 0.0) || !period.is_finite() {
            return Err(Error::NonPositiveLength(period));
        }
        let n = samples.len();
        if n < 64 || !n.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "sample count {n} is not a power of two >= 64"
            )));
        }
        Ok(Self { period, samples })
    }

    pub fn from_fn<F: Fn(f64) -> Complex64>(period: f64, n: usize, f: F) -> Result<Self> {
        let samples = (0..n).map(|k| f(k as f64 * period / n as f64)).collect();
        Self::new(period, samples)
    }

    pub fn constant(period: f64, n: usize, c: Complex64) -> Result<Self> {
        Self::new(period, vec![c; n])
    }

    /// `e^{2πiνt/ℓ}`.
    pub fn mode(period: f64, n: usize, nu: i64) -> Result<Self> {
        Self::from_fn(period, n, |t| {
            Complex64::from_polar(1.0, 2.0 * PI * nu as f64 * t / period)
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        let n = self.len() as f64;
        (0..self.len())
            .map(|k| k as f64 * self.period / n)
            .collect()
    }

    /// Wavenumber of FFT slot `k`.
    pub fn wavenumber(&self, k: usize) -> i64 {
        let n = self.len();
        if k <= n / 2 {
            k as i64
        } else {
            k as i64 - n as i64
        }
    }

    /// Eigenvalue `(2πν/ℓ)²` of `−d²/dt²` for slot `k`.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let w = 2.0 * PI * self.wavenumber(k) as f64 / self.period;
        w * w
    }

    /// Coefficients `f_ν` with `f(t) = Σ f_ν e^{2πiνt/ℓ}`, in FFT order.
    pub fn coefficients(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        FftPlanner::new()
            .plan_fft_forward(buf.len())
            .process(&mut buf);
        let n = buf.len() as f64;
        buf.iter_mut().for_each(|c| *c /= n);
        buf
    }

    pub fn from_coefficients(period: f64, mut coefficients: Vec<Complex64>) -> Result<Self> {
        FftPlanner::new()
            .plan_fft_inverse(coefficients.len())
            .process(&mut coefficients);
        Self::new(period, coefficients)
    }

    /// Multiplies coefficient `ν` by `m(λ_ν, ν)`.
    pub fn apply_multiplier<F: Fn(f64, i64) -> f64>(&self, m: F) -> Self {
        let mut c = self.coefficients();
        for (k, v) in c.iter_mut().enumerate() {
            *v *= m(self.eigenvalue(k), self.wavenumber(k));
        }
        Self::from_coefficients(self.period, c).expect("same length")
    }

    /// Periodic trapezoid rule.
    pub fn integral(&self) -> Complex64 {
        self.samples.iter().sum::<Complex64>() * (self.period / self.len() as f64)
    }

    /// `∫ f conj(g)`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        let s: Complex64 = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a * b.conj())
            .sum();
        s * (self.period / self.len() as f64)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.inner(self).re
    }

    pub fn mean(&self) -> Complex64 {
        self.integral() / self.period
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Self {
        Self {
            period: self.period,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(&self, other: &Self, f: F) -> Self {
        Self {
            period: self.period,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(|v| v.conj())
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `(−d²/dt² + c) f` by spectral differentiation.
    pub fn forward_operator(&self, c: f64) -> Self {
        self.apply_multiplier(|lambda, _| c + lambda)
    }
}

/// Eigenvalues `λ_ν`, `ν = 0..N/2`, and the multipliers applied to them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDiagnostics {
    pub eigenvalues: Vec<f64>,
    pub multipliers: Vec<f64>,
}

fn diagnostics<F: Fn(f64, i64) -> f64>(f: &PeriodicFunction, m: F) -> SpectralDiagnostics {
    let half = f.len() / 2;
    let eigenvalues: Vec<f64> = (0..=half).map(|k| f.eigenvalue(k)).collect();
    let multipliers = eigenvalues
        .iter()
        .zip(0..)
        .map(|(&l, nu)| m(l, nu))
        .collect();
    SpectralDiagnostics {
        eigenvalues,
        multipliers,
    }
}

/// `a(t) = A_{z̄z̄}(u(t)) conj(u̇(t))²` along the unit-speed geodesic.
pub fn restrict_to_geodesic(
    a: &HarmonicBeltrami,
    gamma: &ClosedGeodesic,
    n: usize,
    convention: NormConvention,
) -> Result<PeriodicFunction> {
    let g = if gamma.convention == convention {
        gamma.clone()
    } else {
        gamma.with_convention(convention)
    };
    let n = if n == 0 { g.samples } else { n };
    if a.is_zero() {
        return PeriodicFunction::constant(g.length, n, Complex64::new(0.0, 0.0));
    }
    PeriodicFunction::from_fn(g.length, n, |t| {
        let s = g.sample(t);
        let z = s.point.to_complex();
        a.lowered_with(z, convention) * s.velocity.conj().powi(2)
    })
}

pub fn geodesic_integral(f: &PeriodicFunction) -> Complex64 {
    f.integral()
}

fn resolvent_multiplier(c: f64) -> impl Fn(f64, i64) -> f64 {
    move |lambda, _| 1.0 / (c + lambda)
}

fn m_multiplier(lambda: f64, nu: i64) -> f64 {
    if nu == 0 {
        0.0
    } else {
        1.0 - 1.0 / (2.0 + lambda)
    }
}

/// `(−d²/dt² + c)⁻¹ f`.
pub fn line_resolvent(f: &PeriodicFunction, c: f64) -> Result<PeriodicFunction> {
    if !(c > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "resolvent parameter {c} must be positive"
        )));
    }
    Ok(f.apply_multiplier(resolvent_multiplier(c)))
}

pub fn line_resolvent_diagnostics(f: &PeriodicFunction, c: f64) -> SpectralDiagnostics {
    diagnostics(f, resolvent_multiplier(c))
}

/// `M f = Σ_{ν≠0} (1 − 1/(2 + λ_ν)) f_ν e_ν`.
pub fn m_operator(f: &PeriodicFunction) -> PeriodicFunction {
    f.apply_multiplier(m_multiplier)
}

/// `M f` as `f₀ − (2 − d²/dt²)⁻¹ f₀` with `f₀ = f − mean f`.
pub fn m_operator_identity(f: &PeriodicFunction) -> PeriodicFunction {
    let mean = f.mean();
    let f0 = f.map(|v| v - mean);
    let r = line_resolvent(&f0, 2.0).expect("positive parameter");
    f0.zip_with(&r, |a, b| a - b)
}

pub fn m_operator_diagnostics(f: &PeriodicFunction) -> SpectralDiagnostics {
    diagnostics(f, m_multiplier)
}

/// The inequality `0 ≤ Re ∫ M(f) conj f ≤ ½ var(f)` with
/// `var(f) = ∫|f|² − |∫f|²/ℓ`, evaluated as stated (`pass`), next to the
/// sharp sandwich `½ var ≤ Re ∫ M(f) conj f ≤ var` implied by the
/// multipliers `1 − 1/(2 + λ_ν) ∈ [½, 1)` (`sharp_pass`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormBoundsReport {
    pub lhs: f64,
    pub mid: f64,
    pub mid_imag: f64,
    pub rhs: f64,
    pub variance: f64,
    pub pass: bool,
    pub sharp_pass: bool,
}

pub fn form_bounds_report(f: &PeriodicFunction) -> FormBoundsReport {
    let m = m_operator(f).inner(f);
    let total = f.integral();
    let variance = f.norm_sqr() - total.norm_sqr() / f.period;
    let rhs = 0.5 * variance;
    let tol = 1e-10 * f.norm_sqr().max(1.0);
    let pass = m.re >= -tol && m.re <= rhs + tol && m.im.abs() < tol;
    let sharp_pass = m.re >= rhs - tol && m.re <= variance + tol && m.im.abs() < tol;
    FormBoundsReport {
        lhs: 0.0,
        mid: m.re,
        mid_imag: m.im,
        rhs,
        variance,
        pass,
        sharp_pass,
    }
}

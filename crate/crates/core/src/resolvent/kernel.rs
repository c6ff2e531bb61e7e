use std::f64::consts::PI;

use serde::Serialize;

use crate::quadrature::gauss_legendre_on;
use crate::{Error, Result};

/// `Q₁(x) = (x/2) ln((x+1)/(x−1)) − 1` for `x > 1`.
pub fn legendre_q1(x: f64) -> f64 {
    if x > 4.0 {
        // Σ_{k≥1} x^{−2k}/(2k+1)
        let u = 1.0 / (x * x);
        let mut term = u;
        let mut sum: f64 = 0.0;
        let mut k = 1.0;
        while term > 1e-18 * sum.max(f64::MIN_POSITIVE) {
            sum += term / (2.0 * k + 1.0);
            term *= u;
            k += 1.0;
        }
        sum
    } else {
        0.5 * x * (2.0 / (x - 1.0)).ln_1p() - 1.0
    }
}

fn q1_of_distance(d: f64) -> f64 {
    if d < 2.0 {
        // cosh d · ln coth(d/2) − 1
        -d.cosh() * (0.5 * d).tanh().ln() - 1.0
    } else {
        legendre_q1(d.cosh())
    }
}

/// `∫_x^∞ Q₁`.
fn q1_tail(x: f64) -> f64 {
    if x <= 1.0 {
        0.5
    } else if x > 4.0 {
        // Σ_{k≥1} x^{1−2k}/((2k+1)(2k−1))
        let u = 1.0 / (x * x);
        let mut term = 1.0 / x;
        let mut sum: f64 = 0.0;
        let mut k = 1.0;
        while term > 1e-18 * sum.max(f64::MIN_POSITIVE) {
            sum += term / ((2.0 * k + 1.0) * (2.0 * k - 1.0));
            term *= u;
            k += 1.0;
        }
        sum
    } else {
        0.5 * x - 0.25 * (x * x - 1.0) * (2.0 / (x - 1.0)).ln_1p()
    }
}

/// Free resolvent kernel `Q₁(cosh d)/π` of `□ + 1`, `□ = −2y²∂∂̄`.
pub fn free_kernel(d: f64) -> Result<f64> {
    if !(d > 0.0) {
        return Err(Error::NonPositiveDistance(d));
    }
    Ok(q1_of_distance(d) / PI)
}

/// `C^∞` step from 0 at `t ≤ 0` to 1 at `t ≥ 1`.
pub(crate) fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

/// Split of the kernel into a near part `K(1 − τ)` integrated in polar
/// coordinates, a middle part `Kτσ` summed over the orbit of the mesh, and
/// a tail `K(1 − σ)` replaced by its mass times the mean of the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenKernel {
    pub kappa: f64,
    /// `τ` rises from 0 to 1 on `[near/2, near]`.
    pub near: f64,
    /// `σ` falls from 1 to 0 on `[cutoff − 1, cutoff]`.
    pub cutoff: f64,
}

impl GreenKernel {
    pub fn new(near: f64, cutoff: f64) -> Result<Self> {
        if !(near > 0.0 && cutoff >= near + 1.0) {
            return Err(Error::InvalidArgument(format!(
                "bad kernel split near = {near}, cutoff = {cutoff}"
            )));
        }
        Ok(Self {
            kappa: 1.0 / PI,
            near,
            cutoff,
        })
    }

    pub fn eval(&self, d: f64) -> f64 {
        self.kappa * q1_of_distance(d)
    }

    pub fn tau(&self, d: f64) -> f64 {
        smooth_step((d - 0.5 * self.near) / (0.5 * self.near))
    }

    pub fn sigma(&self, d: f64) -> f64 {
        1.0 - smooth_step(d - (self.cutoff - 1.0))
    }

    /// Kernel weight used in the orbit sum.
    pub fn middle(&self, d: f64) -> f64 {
        if d >= self.cutoff || d <= 0.5 * self.near {
            0.0
        } else {
            self.eval(d) * self.tau(d) * self.sigma(d)
        }
    }

    /// Total mass `∫_{d > r} K dA`.
    pub fn mass_beyond(&self, r: f64) -> f64 {
        2.0 * PI * self.kappa * q1_tail(r.cosh())
    }

    /// `∫ K(1 − τ) dA`.
    pub fn near_mass(&self) -> f64 {
        let inner = self.mass_beyond(0.0) - self.mass_beyond(0.5 * self.near);
        let ramp: f64 = gauss_legendre_on(48, 0.5 * self.near, self.near)
            .map(|(r, w)| w * self.eval(r) * (1.0 - self.tau(r)) * r.sinh())
            .sum();
        inner + 2.0 * PI * ramp
    }

    /// `∫ K(1 − σ) dA`.
    pub fn tail_mass(&self) -> f64 {
        let ramp: f64 = gauss_legendre_on(48, self.cutoff - 1.0, self.cutoff)
            .map(|(r, w)| w * self.eval(r) * (1.0 - self.sigma(r)) * r.sinh())
            .sum();
        2.0 * PI * ramp + self.mass_beyond(self.cutoff)
    }
}

impl Default for GreenKernel {
    fn default() -> Self {
        Self {
            kappa: 1.0 / PI,
            near: 2.0,
            cutoff: 5.0,
        }
    }
}

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use super::field::SurfaceField;
use super::kernel::GreenKernel;
use crate::quadrature::gauss_legendre_on;
use crate::surface::{FuchsianSurface, QuadratureMesh};
use crate::{Error, Result};

const CHUNK: usize = 16;

/// `Kτσ` tabulated on a uniform grid in `d`, linearly interpolated.
#[derive(Debug)]
struct KernelTable {
    lo: f64,
    step: f64,
    values: Vec<f64>,
}

impl KernelTable {
    const SIZE: usize = 1 << 16;

    fn new(k: &GreenKernel) -> Self {
        let lo = 0.5 * k.near;
        let step = (k.cutoff - lo) / (Self::SIZE - 1) as f64;
        let values = (0..Self::SIZE)
            .map(|i| k.middle(lo + step * i as f64))
            .collect();
        Self { lo, step, values }
    }

    fn eval(&self, d: f64) -> f64 {
        let pos = (d - self.lo) / self.step;
        if pos <= 0.0 || pos >= (Self::SIZE - 1) as f64 {
            return 0.0;
        }
        let i = pos as usize;
        let f = pos - i as f64;
        self.values[i] * (1.0 - f) + self.values[i + 1] * f
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ResolventOptions {
    pub kernel: GreenKernel,
    /// Radial and angular nodes of the polar rule on the near disc.
    pub radial: usize,
    pub angular: usize,
    /// Frame height above which the cusp expansion replaces the orbit sum;
    /// `None` picks `max(1.5 r_max, 2w/π)` from the Ford arcs.
    pub cusp_height: Option<f64>,
    pub horocycle_points: usize,
    /// Relative tolerance for the tail estimate.
    pub tolerance: f64,
}

impl Default for ResolventOptions {
    fn default() -> Self {
        Self {
            kernel: GreenKernel::default(),
            radial: 32,
            angular: 48,
            cusp_height: None,
            horocycle_points: 32,
            tolerance: 1e-2,
        }
    }
}

/// `(□ + 1)⁻¹` on a surface, discretized on a quadrature mesh.
#[derive(Debug, Clone)]
pub struct Resolvent {
    pub surface: Arc<FuchsianSurface>,
    pub mesh: Arc<QuadratureMesh>,
    pub options: ResolventOptions,
    pub cusp_height: f64,
    polar: Vec<(f64, f64)>,
    tail_mass: f64,
    table: Arc<KernelTable>,
}

/// One evaluation with its tail estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventValue {
    pub value: Complex64,
    pub near: Complex64,
    pub middle: Complex64,
    pub tail: Complex64,
    /// Twice the tail mass times the larger of the deviation of the data's
    /// mean over the outer annulus from its surface mean and the
    /// equidistribution scale `e^{−(R−1)/2}·std(χ)`.
    pub tail_estimate: f64,
}

impl Resolvent {
    pub fn new(
        surface: Arc<FuchsianSurface>,
        mesh: Arc<QuadratureMesh>,
        options: ResolventOptions,
    ) -> Result<Self> {
        let k = GreenKernel::new(options.kernel.near, options.kernel.cutoff)?;
        if options.radial < 2 || options.angular < 4 || options.horocycle_points < 8 {
            return Err(Error::InvalidArgument(
                "resolvent quadrature too coarse".into(),
            ));
        }
        let r_max = surface
            .ford
            .arcs
            .iter()
            .map(|a| a.radius)
            .fold(0.0, f64::max);
        let cusp_height = options
            .cusp_height
            .unwrap_or_else(|| (1.5 * r_max).max(2.0 * surface.frame.width / PI));
        // r = δ s², dr = 2δ s ds.
        let dtheta = 2.0 * PI / options.angular as f64;
        let polar = gauss_legendre_on(options.radial, 0.0, 1.0)
            .map(|(s, w)| {
                let r = k.near * s * s;
                (
                    r,
                    w * 2.0 * k.near * s * k.eval(r) * (1.0 - k.tau(r)) * r.sinh() * dtheta,
                )
            })
            .collect();
        Ok(Self {
            surface,
            mesh,
            options,
            cusp_height,
            polar,
            tail_mass: k.tail_mass(),
            table: Arc::new(KernelTable::new(&k)),
        })
    }

    pub fn kernel(&self) -> &GreenKernel {
        &self.options.kernel
    }

    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Frame height of the highest orbit point of `z`.
    pub fn frame_height(&self, z: Complex64) -> f64 {
        self.surface.cusp_height(z)
    }

    /// Prepares `χ` for repeated evaluation of `(□ + 1)⁻¹χ`.
    pub fn prepare(&self, chi: &SurfaceField) -> Result<PreparedResolvent> {
        if chi.values.len() != self.mesh.len() {
            return Err(Error::DimensionMismatch(format!(
                "field has {} values, mesh has {} nodes",
                chi.values.len(),
                self.mesh.len()
            )));
        }
        let weighted: Vec<Complex64> = chi
            .values
            .iter()
            .zip(&self.mesh.weights)
            .map(|(v, w)| v * w)
            .collect();
        let mean = weighted.iter().sum::<Complex64>() / self.mesh.area();
        let spread = (chi
            .values
            .iter()
            .zip(&self.mesh.weights)
            .map(|(v, w)| (v - mean).norm_sqr() * w)
            .sum::<f64>()
            / self.mesh.area())
        .sqrt();
        let nodes = &self.mesh.nodes;
        let chunks = (0..nodes.len())
            .step_by(CHUNK)
            .map(|start| {
                let end = (start + CHUNK).min(nodes.len());
                let c = nodes[start];
                let radius = nodes[start..end]
                    .iter()
                    .map(|p| p.distance(&c))
                    .fold(0.0, f64::max);
                (
                    start,
                    end,
                    c.to_complex(),
                    (self.options.kernel.cutoff + radius).cosh(),
                )
            })
            .collect();
        let mut p = PreparedResolvent {
            resolvent: self.clone(),
            chi: chi.clone(),
            xs: nodes.iter().map(|p| p.x).collect(),
            ys: nodes.iter().map(|p| p.y).collect(),
            chunks,
            weighted,
            mean,
            spread,
            cusp: None,
        };
        p.cusp = Some(p.cusp_expansion());
        Ok(p)
    }
}

/// Zeroth-mode data and horocycle Fourier modes above the cusp height.
#[derive(Debug, Clone)]
struct CuspExpansion {
    alpha: Complex64,
    modes: Vec<(i64, Complex64)>,
    x_ref: f64,
    grid_step: f64,
    /// Cumulative `∫_{Y_c}^{s} χ₀` and `∫_{s}^∞ χ₀/s³` on the grid.
    i1: Vec<Complex64>,
    i3: Vec<Complex64>,
    chi_end: Complex64,
}

/// `χ` ready for evaluation of `(□ + 1)⁻¹χ` at arbitrary points.
#[derive(Debug, Clone)]
pub struct PreparedResolvent {
    resolvent: Resolvent,
    chi: SurfaceField,
    xs: Vec<f64>,
    ys: Vec<f64>,
    /// Runs of consecutive nodes with a bounding ball `(start, end, centre,
    /// cosh of the largest distance at which the run can still contribute)`.
    chunks: Vec<(usize, usize, Complex64, f64)>,
    weighted: Vec<Complex64>,
    mean: Complex64,
    spread: f64,
    cusp: Option<CuspExpansion>,
}

impl PreparedResolvent {
    pub fn mean(&self) -> Complex64 {
        self.mean
    }

    /// Orbit-sum evaluation, valid at any point (used below the cusp
    /// height).
    pub fn eval_direct(&self, z: Complex64) -> ResolventValue {
        let r = &self.resolvent;
        let k = r.kernel();
        let (z, _) = r.surface.reduce(z);
        let mut near = Complex64::new(0.0, 0.0);
        let n_ang = r.options.angular;
        for &(rad, w) in &r.polar {
            let t = (0.5 * rad).tanh();
            let mut ring = Complex64::new(0.0, 0.0);
            for j in 0..n_ang {
                let zeta = Complex64::from_polar(t, 2.0 * PI * (j as f64 + 0.5) / n_ang as f64);
                let p = (z - z.conj() * zeta) / (1.0 - zeta);
                ring += self.chi.eval(p);
            }
            near += ring * w;
        }
        let cosh_cut = k.cutoff.cosh();
        let cosh_inner = (0.5 * k.near).cosh();
        let cosh_ann = (k.cutoff - 1.0).cosh();
        let mut middle = Complex64::new(0.0, 0.0);
        let (mut ann_w, mut ann_chi) = (0.0, Complex64::new(0.0, 0.0));
        for tile in r.surface.tiles_near(z, k.cutoff) {
            let p = tile.element.inverse().apply_complex(z);
            for &(start, end, c, reach) in &self.chunks {
                if 1.0 + (p - c).norm_sqr() / (2.0 * p.im * c.im) >= reach {
                    continue;
                }
                for i in start..end {
                    let (dx, y) = (p.re - self.xs[i], self.ys[i]);
                    let dy = p.im - y;
                    let ch = 1.0 + (dx * dx + dy * dy) / (2.0 * p.im * y);
                    if ch >= cosh_cut || ch <= cosh_inner {
                        continue;
                    }
                    let d = ch.acosh();
                    let kd = r.table.eval(d);
                    middle += self.weighted[i] * kd;
                    if ch > cosh_ann {
                        let w = kd * r.mesh.weights[i];
                        ann_w += w;
                        ann_chi += self.chi.values[i] * w;
                    }
                }
            }
        }
        let tail = self.mean * r.tail_mass;
        let deviation = if ann_w > 0.0 {
            (ann_chi / ann_w - self.mean).norm()
        } else {
            0.0
        };
        ResolventValue {
            value: near + middle + tail,
            near,
            middle,
            tail,
            tail_estimate: 2.0
                * r.tail_mass
                * deviation.max((-(k.cutoff - 1.0) / 2.0).exp() * self.spread),
        }
    }

    fn cusp_expansion(&self) -> CuspExpansion {
        let r = &self.resolvent;
        let frame = &r.surface.frame;
        let (w, yc, m) = (frame.width, r.cusp_height, r.options.horocycle_points);
        let x_ref = frame.lo;
        let at = |j: usize, y: f64| {
            frame.from_frame(Complex64::new(x_ref + w * (j as f64 + 0.5) / m as f64, y))
        };
        let phi: Vec<Complex64> = (0..m)
            .into_par_iter()
            .map(|j| self.eval_direct(at(j, yc)).value)
            .collect();
        let half = (m / 2) as i64;
        let modes: Vec<(i64, Complex64)> = (-half + 1..half)
            .map(|n| {
                let c: Complex64 = phi
                    .iter()
                    .enumerate()
                    .map(|(j, v)| {
                        v * Complex64::from_polar(
                            1.0,
                            -2.0 * PI * n as f64 * (j as f64 + 0.5) / m as f64,
                        )
                    })
                    .sum();
                (n, c / m as f64)
            })
            .collect();
        // Eight grid points per e-fold of e^{−4πs/w}.
        let grid_step = w / (4.0 * PI) / 8.0;
        let steps = 8 * 60;
        let chi0: Vec<Complex64> = (0..=steps)
            .into_par_iter()
            .map(|i| {
                let y = yc + i as f64 * grid_step;
                (0..m).map(|j| self.chi.eval(at(j, y))).sum::<Complex64>() / m as f64
            })
            .collect();
        let mut i1 = vec![Complex64::new(0.0, 0.0); steps + 1];
        for i in 1..=steps {
            i1[i] = i1[i - 1] + 0.5 * grid_step * (chi0[i] + chi0[i - 1]);
        }
        // Beyond the grid χ₀ is continued by its last value.
        let y_end = yc + steps as f64 * grid_step;
        let mut i3 = vec![Complex64::new(0.0, 0.0); steps + 1];
        i3[steps] = chi0[steps] / (2.0 * y_end * y_end);
        for i in (0..steps).rev() {
            let (s0, s1) = (yc + i as f64 * grid_step, yc + (i + 1) as f64 * grid_step);
            i3[i] = i3[i + 1] + 0.5 * grid_step * (chi0[i] / s0.powi(3) + chi0[i + 1] / s1.powi(3));
        }
        let phi0 = modes
            .iter()
            .find(|m| m.0 == 0)
            .map_or(Complex64::new(0.0, 0.0), |m| m.1);
        let alpha = yc * (phi0 - 2.0 * yc * yc / 3.0 * i3[0]);
        CuspExpansion {
            alpha,
            modes,
            x_ref,
            grid_step,
            i1,
            i3,
            chi_end: chi0[steps],
        }
    }

    fn eval_cusp(&self, zeta: Complex64) -> Complex64 {
        let c = self.cusp.as_ref().expect("prepared");
        let r = &self.resolvent;
        let (w, yc) = (r.surface.frame.width, r.cusp_height);
        let y = zeta.im;
        let pos = (y - yc) / c.grid_step;
        let last = c.i1.len() - 1;
        let (i1, i3) = if pos >= last as f64 {
            let y_end = yc + last as f64 * c.grid_step;
            (
                c.i1[last] + c.chi_end * (y - y_end),
                c.chi_end / (2.0 * y * y),
            )
        } else {
            let i = pos.floor() as usize;
            let f = pos - i as f64;
            (
                c.i1[i] * (1.0 - f) + c.i1[i + 1] * f,
                c.i3[i] * (1.0 - f) + c.i3[i + 1] * f,
            )
        };
        let mut value = c.alpha / y + 2.0 / (3.0 * y) * i1 + 2.0 * y * y / 3.0 * i3;
        for &(n, a) in &c.modes {
            if n == 0 {
                continue;
            }
            let k = 2.0 * PI * n.abs() as f64 / w;
            let decay = (-k * (y - yc)).exp() * (1.0 + 1.0 / (k * y)) / (1.0 + 1.0 / (k * yc));
            let m = m_phase(n, zeta.re - c.x_ref, w);
            value += a * decay * m;
        }
        value
    }

    /// `(□ + 1)⁻¹χ` at `z` with its tail estimate.
    pub fn eval(&self, z: Complex64) -> ResolventValue {
        let r = &self.resolvent;
        let zeta = r.surface.frame.to_frame(r.surface.reduce(z).0);
        if zeta.im > r.cusp_height {
            let v = self.eval_cusp(zeta);
            let zero = Complex64::new(0.0, 0.0);
            ResolventValue {
                value: v,
                near: zero,
                middle: zero,
                tail: zero,
                tail_estimate: 0.0,
            }
        } else {
            self.eval_direct(z)
        }
    }

    /// The field `(□ + 1)⁻¹χ` on the mesh, with `self` as evaluator.
    pub fn into_field(self) -> SurfaceField {
        let this = Arc::new(self);
        let nodes = this.resolvent.mesh.nodes.clone();
        let values = nodes
            .par_iter()
            .map(|p| this.eval(p.to_complex()).value)
            .collect();
        let f = this.clone();
        SurfaceField::new(values, move |z| f.eval(z).value)
    }
}

fn m_phase(n: i64, x: f64, w: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * n as f64 * x / w)
}

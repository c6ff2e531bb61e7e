use num_complex::Complex64;
use rayon::prelude::*;

use super::model::FuchsianSurface;
use crate::quadrature::gauss_legendre;
use crate::{Error, Point, Result};

/// Default horocycle truncation height in the cusp frame.
pub const DEFAULT_Y_MAX: f64 = 1e8;

/// Quadrature for `∫ f dx dy / y²` over the truncated fundamental domain.
///
/// Nodes are placed on the Ford domain (strip above the isometric-circle
/// floor, truncated at height `Y_max`) and then moved into the ideal
/// quadrilateral, so that tile translates `g F` carry translated nodes.
#[derive(Debug, Clone)]
pub struct QuadratureMesh {
    pub nodes: Vec<Point>,
    pub weights: Vec<f64>,
    pub y_max: f64,
    pub cusp_width: f64,
    /// Gauss–Legendre points per direction on each panel.
    pub order: usize,
}

impl QuadratureMesh {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn area(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Exact hyperbolic area of the truncated domain, `2π − w/Y_max`.
    pub fn truncated_area(&self) -> f64 {
        2.0 * std::f64::consts::PI - self.cusp_width / self.y_max
    }

    pub fn integrate<F: Fn(&Point) -> f64 + Sync + Send>(&self, f: F) -> f64 {
        let v: Vec<f64> = self.nodes.par_iter().map(f).collect();
        v.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }

    pub fn integrate_complex<F: Fn(&Point) -> Complex64 + Sync + Send>(&self, f: F) -> Complex64 {
        let v: Vec<Complex64> = self.nodes.par_iter().map(f).collect();
        v.iter().zip(&self.weights).map(|(a, w)| a * w).sum()
    }
}

/// Gauss order per direction for a target cell count over `panels` panels.
pub fn order_for_cells(target_cells: usize, panels: usize) -> usize {
    ((target_cells as f64 / panels.max(1) as f64).sqrt().ceil() as usize).max(3)
}

#[derive(Debug, Clone, Copy)]
enum Panel {
    /// Under the horocycle `y = Y_a`, above one floor arc, in `(θ, u = 1/y)`
    /// with `x = c + r cos θ`.
    Floor { arc: usize, y_top: f64 },
    /// `[x_lo, x_hi] × [e^{t_lo}, e^{t_hi}]` in `(x, t = ln y)`.
    Strip {
        x_lo: f64,
        x_hi: f64,
        t_lo: f64,
        t_hi: f64,
    },
    /// Above `y_lo` up to `Y_max`, in `(x, u)`.
    Cap { y_lo: f64 },
}

fn panels(surface: &FuchsianSurface, y_max: f64) -> Vec<Panel> {
    let arcs = &surface.ford.arcs;
    let w = surface.frame.width;
    let x0 = surface.ford.x0;
    let y_a = arcs.iter().map(|a| a.radius).fold(0.0, f64::max);
    let y_b = (1e3 * y_a.max(w / std::f64::consts::PI)).min(y_max);
    let mut out: Vec<Panel> = (0..arcs.len())
        .map(|arc| Panel::Floor { arc, y_top: y_a })
        .collect();
    let mut t = y_a.ln();
    while t < y_b.ln() - 1e-12 {
        let t_hi = (t + 1.0).min(y_b.ln());
        let m = (w / t.exp()).ceil().max(1.0) as usize;
        for k in 0..m {
            let x_lo = x0 + w * k as f64 / m as f64;
            let x_hi = x0 + w * (k + 1) as f64 / m as f64;
            out.push(Panel::Strip {
                x_lo,
                x_hi,
                t_lo: t,
                t_hi,
            });
        }
        t = t_hi;
    }
    if y_b < y_max {
        out.push(Panel::Cap { y_lo: y_b });
    }
    out
}

/// Tensor Gauss–Legendre panels covering the Ford domain truncated at
/// `Y_max`: one curved panel above each floor arc, then log-height panels of
/// unit hyperbolic thickness (split in `x` while the horocycle is longer
/// than 1), and a final panel in `u = 1/y`, where the measure is `dx du`.
pub fn build_mesh(
    surface: &FuchsianSurface,
    target_cells: usize,
    y_max: f64,
) -> Result<QuadratureMesh> {
    if target_cells < 100 {
        return Err(Error::InvalidArgument(format!(
            "target_cells {target_cells} below 100"
        )));
    }
    if !(y_max > 10.0) {
        return Err(Error::InvalidArgument(format!("Y_max {y_max} too small")));
    }
    let arcs = &surface.ford.arcs;
    let frame = &surface.frame;
    let (w, x0) = (frame.width, surface.ford.x0);
    let layout = panels(surface, y_max);
    let n = order_for_cells(target_cells, layout.len());
    let rule = gauss_legendre(n);
    let mut raw: Vec<(f64, f64, f64)> = Vec::with_capacity(layout.len() * n * n);
    let on = |a: f64, b: f64, xi: f64| a + (b - a) * (xi + 1.0) / 2.0;
    for panel in layout {
        for &(xi, wx) in &rule {
            for &(yi, wy) in &rule {
                raw.push(match panel {
                    Panel::Floor { arc, y_top } => {
                        let a = &arcs[arc];
                        let angle = |x: f64| ((x - a.center) / a.radius).clamp(-1.0, 1.0).acos();
                        let (th_lo, th_hi) = (angle(a.x_hi), angle(a.x_lo));
                        let th = on(th_lo, th_hi, xi);
                        let h = a.radius * th.sin();
                        let (u0, u1) = (y_top.recip(), h.recip());
                        let u = on(u0, u1, yi);
                        (
                            a.center + a.radius * th.cos(),
                            u.recip(),
                            wx * wy * (th_hi - th_lo) * h * (u1 - u0) / 4.0,
                        )
                    }
                    Panel::Strip {
                        x_lo,
                        x_hi,
                        t_lo,
                        t_hi,
                    } => {
                        let t = on(t_lo, t_hi, yi);
                        (
                            on(x_lo, x_hi, xi),
                            t.exp(),
                            wx * wy * (x_hi - x_lo) * (t_hi - t_lo) * (-t).exp() / 4.0,
                        )
                    }
                    Panel::Cap { y_lo } => {
                        let (u0, u1) = (y_max.recip(), y_lo.recip());
                        let u = on(u0, u1, yi);
                        (on(x0, x0 + w, xi), u.recip(), wx * wy * w * (u1 - u0) / 4.0)
                    }
                });
            }
        }
    }
    let mut nodes = Vec::with_capacity(raw.len());
    let mut weights = Vec::with_capacity(raw.len());
    for (x, y, wt) in raw.into_iter().filter(|r| r.2 > 0.0) {
        let (zeta, _) = frame.reduce_quad(Complex64::new(x, y));
        let z = frame.from_frame(zeta);
        nodes.push(Point::new_unchecked(z.re, z.im));
        weights.push(wt);
    }
    Ok(QuadratureMesh {
        nodes,
        weights,
        y_max,
        cusp_width: w,
        order: n,
    })
}

impl FuchsianSurface {
    pub fn build_mesh(&self, target_cells: usize, y_max: f64) -> Result<QuadratureMesh> {
        build_mesh(self, target_cells, y_max)
    }
}

use num_complex::Complex64;

use super::model::FuchsianSurface;
use super::tiles::distance_to_geodesic;
use super::word::Word;
use crate::hyperbolic::{AxisSample, NormConvention};
use crate::{Axis, Error, Mobius, Point, Result};

/// Closed geodesic given by a conjugacy class of the surface group.
#[derive(Debug, Clone)]
pub struct ClosedGeodesic {
    pub word: Word,
    pub element: Mobius,
    pub axis: Axis,
    /// Classical length `2 arccosh(|tr|/2)`.
    pub l_cl: f64,
    pub convention: NormConvention,
    /// Length in the chosen convention.
    pub length: f64,
    /// Sample count used along the geodesic.
    pub samples: usize,
}

/// Smallest power of two `N ≥ max(256, 64 ℓ)`.
pub fn default_samples(length: f64) -> usize {
    let want = (64.0 * length).ceil().max(256.0) as usize;
    want.next_power_of_two()
}

impl ClosedGeodesic {
    /// Unit-speed sample at parameter `t ∈ [0, ℓ)`.
    pub fn sample(&self, t: f64) -> AxisSample<f64> {
        self.axis.unit_speed_point(t, self.convention)
    }

    /// Parameters `t_k = k ℓ / N`.
    pub fn parameters(&self) -> Vec<f64> {
        (0..self.samples)
            .map(|k| k as f64 * self.length / self.samples as f64)
            .collect()
    }

    pub fn with_convention(&self, convention: NormConvention) -> Self {
        let mut g = self.clone();
        g.convention = convention;
        g.length = convention.length_from_classical(self.l_cl);
        g.samples = default_samples(g.length).max(self.samples);
        g
    }
}

/// Closed geodesic of the class of `w`; `samples = 0` picks the default.
pub fn geodesic_representative(
    surface: &FuchsianSurface,
    w: &Word,
    samples: usize,
    convention: NormConvention,
) -> Result<ClosedGeodesic> {
    if w.is_empty() {
        return Err(Error::IdentityElement);
    }
    let element = w.eval(&surface.a, &surface.b);
    let axis = crate::hyperbolic::axis_standardize(&element)?;
    let length = convention.length_from_classical(axis.l_cl);
    let samples = if samples == 0 {
        default_samples(length)
    } else {
        samples
    };
    if !samples.is_power_of_two() || samples < 64 {
        return Err(Error::InvalidArgument(format!(
            "sample count {samples} must be a power of two ≥ 64"
        )));
    }
    Ok(ClosedGeodesic {
        word: w.clone(),
        element,
        l_cl: axis.l_cl,
        axis,
        convention,
        length,
        samples,
    })
}

/// A translate `h(axis)` of a closed geodesic's axis.
#[derive(Debug, Clone)]
pub struct AxisTranslate {
    /// `h ∈ Γ`; the coset representative is `h⁻¹`.
    pub element: Mobius,
    pub endpoints: (Option<f64>, Option<f64>),
}

fn endpoint_key(e: Option<f64>) -> i64 {
    match e {
        None => i64::MAX,
        Some(x) => (x * 1e8).round() as i64,
    }
}

fn same_axis(a: (Option<f64>, Option<f64>), b: (Option<f64>, Option<f64>)) -> bool {
    let close = |x: Option<f64>, y: Option<f64>| match (x, y) {
        (None, None) => true,
        (Some(x), Some(y)) => (x - y).abs() <= 1e-8 * (1.0 + x.abs().max(y.abs())),
        _ => false,
    };
    (close(a.0, b.0) && close(a.1, b.1)) || (close(a.0, b.1) && close(a.1, b.0))
}

impl FuchsianSurface {
    /// Elements `k` with `k(axis γ)` crossing the fundamental quadrilateral,
    /// one per distinct translate, found by reducing dense samples of one
    /// period of the axis.
    pub fn axis_arcs(&self, gamma: &ClosedGeodesic) -> Vec<Mobius> {
        let n = (64.0 * gamma.l_cl).ceil().max(256.0) as usize;
        let conv = NormConvention::Riemannian;
        let mut out: Vec<(Mobius, (Option<f64>, Option<f64>))> = Vec::new();
        for k in 0..n {
            let t = gamma.l_cl * k as f64 / n as f64;
            let p = gamma.axis.unit_speed_point(t, conv).point;
            let (_, g) = self.reduce_quad(p.to_complex());
            let ends = (
                g.apply_boundary(gamma.axis.repelling),
                g.apply_boundary(gamma.axis.attracting),
            );
            if !out.iter().any(|(_, e)| same_axis(*e, ends)) {
                out.push((g, ends));
            }
        }
        out.into_iter().map(|(g, _)| g).collect()
    }

    /// Distinct translates of the axis of `γ` meeting the ball of the given
    /// radius about `z`; the axis itself is always first.
    pub fn axis_translates(
        &self,
        gamma: &ClosedGeodesic,
        z: Complex64,
        radius: f64,
    ) -> Vec<AxisTranslate> {
        let base = (gamma.axis.repelling, gamma.axis.attracting);
        let mut out = vec![AxisTranslate {
            element: Mobius::identity(),
            endpoints: base,
        }];
        let arcs = self.axis_arcs(gamma);
        let mut seen: std::collections::HashSet<(i64, i64)> = std::collections::HashSet::new();
        let key = |e: (Option<f64>, Option<f64>)| {
            let (a, b) = (endpoint_key(e.0), endpoint_key(e.1));
            (a.min(b), a.max(b))
        };
        seen.insert(key(base));
        for tile in self.tiles_near(z, radius) {
            for k in &arcs {
                let h = tile.element.compose(k);
                let ends = (h.apply_boundary(base.0), h.apply_boundary(base.1));
                if distance_to_geodesic(ends.0, ends.1, z) > radius {
                    continue;
                }
                if seen.insert(key(ends)) && !out.iter().any(|t| same_axis(t.endpoints, ends)) {
                    out.push(AxisTranslate {
                        element: h,
                        endpoints: ends,
                    });
                }
            }
        }
        out
    }
}

/// Representatives `R` of `⟨γ₀⟩\Γ` whose axis translates `R⁻¹(axis γ₀)` meet
/// the ball of the given radius about the Dirichlet centre.
pub fn coset_reps(surface: &FuchsianSurface, gamma: &ClosedGeodesic, radius: f64) -> Vec<Mobius> {
    let c: Point = surface
        .dirichlet()
        .map(|d| d.center)
        .unwrap_or_else(|_| surface.default_center());
    surface
        .axis_translates(gamma, c.to_complex(), radius)
        .into_iter()
        .map(|t| t.element.inverse())
        .collect()
}

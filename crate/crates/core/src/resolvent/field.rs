use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::surface::QuadratureMesh;

type Evaluator = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

/// A scalar field on the surface: values at the mesh nodes plus an evaluator
/// for arbitrary points.
#[derive(Clone)]
pub struct SurfaceField {
    pub values: Vec<Complex64>,
    evaluator: Evaluator,
}

impl fmt::Debug for SurfaceField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfaceField")
            .field("nodes", &self.values.len())
            .finish_non_exhaustive()
    }
}

impl SurfaceField {
    pub fn new<F>(values: Vec<Complex64>, evaluator: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            values,
            evaluator: Arc::new(evaluator),
        }
    }

    /// Samples `f` on the mesh nodes and keeps it as the evaluator.
    pub fn from_fn<F>(mesh: &QuadratureMesh, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        let values = mesh.nodes.par_iter().map(|p| f(p.to_complex())).collect();
        Self::new(values, f)
    }

    pub fn constant(mesh: &QuadratureMesh, c: Complex64) -> Self {
        Self::new(vec![c; mesh.len()], move |_| c)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (self.evaluator)(z)
    }

    pub fn integrate(&self, mesh: &QuadratureMesh) -> Complex64 {
        self.values
            .iter()
            .zip(&mesh.weights)
            .map(|(v, w)| v * w)
            .sum()
    }

    pub fn max_re(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min_re(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v.re)
            .fold(f64::INFINITY, f64::min)
    }
}

//! Scalar abstraction for the geometry layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, Signed};

/// Floating point scalar usable by the hyperbolic geometry routines.
pub trait Real:
    Float + FloatConst + FromPrimitive + Signed + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("representable literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}

//! Floating-point scalar abstraction: the numerical layer is generic over
//! f32/f64 through this trait, with f64 the default at the crate root.

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};
use std::fmt::{Debug, Display};
use std::iter::Sum;

pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Sum + Debug + Display + Send + Sync + 'static
{
    fn from_f(x: f64) -> Self {
        Self::from_f64(x).expect("f64 conversion")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Deterministic pairwise summation: the reduction order is fixed by the
/// input order, independent of any threading of the callers.
pub fn pairwise_sum<R: Real>(xs: &[R]) -> R {
    match xs.len() {
        0 => R::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let mid = n / 2;
            pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
        }
    }
}

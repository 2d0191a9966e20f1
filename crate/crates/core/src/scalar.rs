//! Scalar abstraction shared by the continuous-math modules.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive};

/// Real floating point scalar: `f32` or `f64`.
pub trait Real: Float + FloatConst + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in every Real")
    }

    /// Degrees to radians.
    #[inline]
    fn from_degrees(deg: f64) -> Self {
        Self::lit(deg.to_radians())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sign(x)` with the tie-break `sign(0) = +1`.
#[inline]
pub fn sign_of<T: Real>(x: T) -> i8 {
    if x >= T::zero() {
        1
    } else {
        -1
    }
}

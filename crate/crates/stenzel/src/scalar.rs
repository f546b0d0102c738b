//! Scalar abstraction: all geometry in this crate is generic over the
//! floating-point type.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating-point scalar the toolkit is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Sum + Send + Sync + 'static
{
    /// Lifts an `f64` constant into the scalar type.
    fn of(x: f64) -> Self {
        Self::from_f64(x).expect("f64 constant must be representable")
    }

    /// Lossy view as `f64`, for diagnostics and serialization.
    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar must convert to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `arccosh` for arguments `x >= 1`, accurate near `x = 1`.
///
/// The naive `ln(x + sqrt(x^2 - 1))` loses half the significant digits as
/// `x -> 1`; rewriting through `s = x - 1` and `ln_1p` keeps full relative
/// accuracy down to the branch point.
pub fn acosh_stable<T: Real>(x: T) -> T {
    let s = x - T::one();
    if s <= T::zero() {
        return T::zero();
    }
    (s + (s * (s + T::of(2.0))).sqrt()).ln_1p()
}

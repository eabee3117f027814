//! Scalar abstraction shared by every floating-point stage.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumCast};

/// Floating-point type usable for intensity and scaling math: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + NumCast + Sum + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal, panicking only if the type cannot represent it.
    fn lit(value: f64) -> Self {
        <Self as NumCast>::from(value).expect("literal representable in scalar type")
    }

    fn from_usize_lossy(value: usize) -> Self {
        <Self as NumCast>::from(value).expect("usize representable in scalar type")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Clamps to the closed unit interval.
#[inline]
pub fn unit_clamp<T: Scalar>(value: T) -> T {
    value.max(T::zero()).min(T::one())
}

/// Quantizes a unit-interval value to a byte with round-half-away-from-zero.
#[inline]
pub fn quantize_unit<T: Scalar>(value: T) -> u8 {
    let scaled = (unit_clamp(value) * T::lit(255.0)).round();
    scaled.to_u8().unwrap_or(u8::MAX)
}

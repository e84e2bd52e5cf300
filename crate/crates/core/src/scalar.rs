//! Scalar abstraction shared by every module.
//!
//! All geometry in this crate is written against [`Real`], which is
//! implemented for `f32` and `f64`. Matrix entries are `Complex<T>`.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Real floating point scalar usable as the base field of a complex matrix.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal into this scalar type.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex entry type over a real scalar.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn cplx<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

/// Principal argument in `(-pi, pi]`; the value `-pi` is folded onto `pi`.
#[inline]
pub fn principal_angle<T: Real>(z: C<T>) -> T {
    let a = z.im.atan2(z.re);
    if a <= -T::PI() {
        T::PI()
    } else {
        a
    }
}

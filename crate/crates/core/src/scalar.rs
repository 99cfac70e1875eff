//! Scalar abstraction shared by every module.
//!
//! All numerics are generic over a binary floating point type `R`
//! (`f32` or `f64`); complex entries are `Complex<R>`.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point scalar: f32 or f64.
pub trait Real:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Debug
    + Display
    + LowerExp
    + Default
    + Sum
    + Send
    + Sync
    + 'static
{
    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal representable")
    }

    /// Converts a (1-based) basis index.
    #[inline]
    fn index(n: usize) -> Self {
        Self::from_usize(n).expect("index representable")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Complex scalar over `R`.
pub type Cx<R> = Complex<R>;

#[inline]
pub(crate) fn cx<R: Real>(re: R, im: R) -> Cx<R> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<R: Real>(x: R) -> Cx<R> {
    Complex::new(x, R::zero())
}

/// Relative realness test for a complex coefficient.
#[inline]
pub(crate) fn nearly_real<R: Real>(z: Cx<R>, tol: R) -> bool {
    z.im.abs() <= tol * (R::one() + z.re.abs())
}

/// `z / |z|`, or zero at the origin.
#[inline]
pub(crate) fn phase<R: Real>(z: Cx<R>) -> Cx<R> {
    let m = z.norm();
    if m == R::zero() {
        Complex::new(R::zero(), R::zero())
    } else {
        z / m
    }
}

//! Scalar abstraction shared by every module.
//!
//! All state and operator types are generic over a real field `T: Real`
//! (`f32` or `f64`). Complex entries are [`num_complex::Complex<T>`].

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Real floating point field the simulator is written against.
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Sum + Debug + Display + Send + Sync + 'static
{
    /// Tolerance for structural invariant checks (norm, trace, Hermiticity).
    fn invariant_tol() -> Self;
    /// Tolerance for analytic identities that should hold to rounding error.
    fn identity_tol() -> Self;

    /// Converts an `f64` literal. Panics only if the literal is not representable,
    /// which cannot happen for the finite constants used in this crate.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {
    fn invariant_tol() -> Self {
        1e-5
    }
    fn identity_tol() -> Self {
        1e-5
    }
}

impl Real for f64 {
    fn invariant_tol() -> Self {
        1e-10
    }
    fn identity_tol() -> Self {
        1e-12
    }
}

/// Complex scalar over `T`.
pub type C<T> = Complex<T>;

#[inline]
pub(crate) fn c<T: Real>(re: T, im: T) -> C<T> {
    Complex::new(re, im)
}

#[inline]
pub(crate) fn re<T: Real>(x: T) -> C<T> {
    Complex::new(x, T::zero())
}

#[inline]
pub(crate) fn is_finite<T: Real>(z: C<T>) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

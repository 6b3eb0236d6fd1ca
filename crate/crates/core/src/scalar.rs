//! Scalar abstraction: the numeric kernels are generic over the floating
//! point type, with `f64` aliases exported at the crate root.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar the library is generic over (`f32`, `f64`).
pub trait Scalar:
    Float + FloatConst + FromPrimitive + NumAssign + Sum<Self> + Debug + Display + Send + Sync + 'static
{
    /// Conversion from an `f64` literal (tolerances, Haar weights).
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal must be representable by the scalar type")
    }

    fn from_usize_exact(v: usize) -> Self {
        Self::from_usize(v).expect("usize must be representable by the scalar type")
    }
}

impl<T> Scalar for T where
    T: Float
        + FloatConst
        + FromPrimitive
        + NumAssign
        + Sum<Self>
        + Debug
        + Display
        + Send
        + Sync
        + 'static
{
}

/// Complex number over the library scalar.
pub type C<T> = Complex<T>;

pub fn c_zero<T: Scalar>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn c_one<T: Scalar>() -> C<T> {
    Complex::new(T::one(), T::zero())
}

pub fn c_real<T: Scalar>(re: T) -> C<T> {
    Complex::new(re, T::zero())
}

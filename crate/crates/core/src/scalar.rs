//! Scalar abstraction shared by the floating-point and exact-rational
//! execution paths.

use std::fmt::Debug;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

/// Field-like scalar the steppers and tableau evaluation are generic over.
///
/// Implemented for `f64` (production) and [`BigRational`] (exact mode, used
/// when the right-hand side is polynomial with rational coefficients).
pub trait Scalar:
    Clone
    + PartialEq
    + Debug
    + Zero
    + One
    + Neg<Output = Self>
    + Sub<Output = Self>
    + Div<Output = Self>
    + Add<Output = Self>
    + Mul<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_i64(n: i64) -> Self;

    /// Convert an exact rational coefficient into this scalar type. This is
    /// the single point where exact coefficients may round.
    fn from_rational(r: &BigRational) -> Self;

    fn to_f64(&self) -> f64;

    /// `false` for NaN or infinities; always `true` for rationals.
    fn is_finite(&self) -> bool;

    /// Strictly positive test, used to validate step sizes.
    fn is_positive(&self) -> bool;
}

impl Scalar for f64 {
    fn from_i64(n: i64) -> Self {
        n as f64
    }

    fn from_rational(r: &BigRational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }

    fn is_positive(&self) -> bool {
        *self > 0.0 && f64::is_finite(*self)
    }
}

impl Scalar for BigRational {
    fn from_i64(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_finite(&self) -> bool {
        true
    }

    fn is_positive(&self) -> bool {
        *self > BigRational::zero()
    }
}

/// `n!` as a big integer.
pub fn factorial(n: u32) -> BigInt {
    (1..=u64::from(n)).map(BigInt::from).product()
}

/// `1/n!` as an exact rational.
pub fn inv_factorial(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), factorial(n))
}

/// Componentwise `a + b`.
pub fn vec_add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + y.clone())
        .collect()
}

/// Componentwise `a + s * b`.
pub fn vec_axpy<T: Scalar>(a: &[T], s: &T, b: &[T]) -> Vec<T> {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.clone() + s.clone() * y.clone())
        .collect()
}

/// Componentwise `s * a`.
pub fn vec_scale<T: Scalar>(s: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| s.clone() * x.clone()).collect()
}

/// Max-norm of the difference of two vectors, in `f64`.
pub fn max_norm_diff<T: Scalar>(a: &[T], b: &[T]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).to_f64().abs())
        .fold(0.0, f64::max)
}

/// Max-norm of a vector, in `f64`.
pub fn max_norm<T: Scalar>(a: &[T]) -> f64 {
    a.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max)
}

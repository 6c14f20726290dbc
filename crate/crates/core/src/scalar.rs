//! Scalar abstraction shared by the floating-point and exact code paths.
//!
//! Assembly and the band reduction are written once over [`Scalar`] so the
//! same stencils can be produced in `f64` for the numerical solvers and in
//! [`BigRational`] for the exact ones.

use std::fmt::Debug;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

pub trait Scalar: Clone + Debug + PartialOrd + Num + Signed + Send + Sync + 'static {
    /// Converts a binary64 value without rounding where the type allows it
    /// (rationals receive the exact dyadic value).
    fn from_f64_exact(value: f64) -> Self;

    fn to_f64_lossy(&self) -> f64;

    fn from_usize(value: usize) -> Self;

    fn is_finite_value(&self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn from_f64_exact(value: f64) -> Self {
        value
    }

    #[inline]
    fn to_f64_lossy(&self) -> f64 {
        *self
    }

    #[inline]
    fn from_usize(value: usize) -> Self {
        value as f64
    }

    #[inline]
    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }
}

impl Scalar for BigRational {
    fn from_f64_exact(value: f64) -> Self {
        BigRational::from_float(value).expect("non-finite value cannot be represented exactly")
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or_else(|| {
            // ToPrimitive gives up on very large numerators/denominators; fall
            // back to a scaled division.
            let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(1000);
            let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
            let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
            n / d
        })
    }

    fn from_usize(value: usize) -> Self {
        BigRational::from_integer(BigInt::from_usize(value).expect("usize fits in BigInt"))
    }

    fn is_finite_value(&self) -> bool {
        true
    }
}

/// Exact rational `numer / denom`.
pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn to_exact(values: &[f64]) -> Vec<BigRational> {
    values.iter().map(|&v| BigRational::from_f64_exact(v)).collect()
}

pub fn to_lossy<T: Scalar>(values: &[T]) -> Vec<f64> {
    values.iter().map(Scalar::to_f64_lossy).collect()
}

pub(crate) fn two<T: Scalar>() -> T {
    T::one() + T::one()
}

pub(crate) fn half<T: Scalar>() -> T {
    T::one() / two::<T>()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    #[test]
    fn exact_conversion_keeps_dyadic_value() {
        let q = BigRational::from_f64_exact(0.1);
        assert_ne!(q, ratio(1, 10));
        assert_eq!(q.to_f64_lossy(), 0.1);
        assert_eq!(BigRational::from_f64_exact(0.375), ratio(3, 8));
    }

    #[test]
    fn lossy_conversion_handles_huge_parts() {
        let big = BigInt::from(3) << 5000usize;
        let q = BigRational::new(big.clone() + BigInt::one(), big);
        assert!((q.to_f64_lossy() - 1.0).abs() < 1e-15);
    }
}

//! Exact scalars with a deferred zero.
//!
//! A [`DeferredScalar`] is a rational function `p(ε) / q(ε)` over the
//! rationals in one formal parameter `ε`. Elimination substitutes `ε` for an
//! exact zero pivot and carries on; [`DeferredScalar::finalize`] takes the
//! limit `ε → 0` afterwards. Values without `ε` stay in the cheap
//! [`DeferredScalar::Exact`] form.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{One, Zero};

/// Polynomial in `ε` with rational coefficients, lowest power first and no
/// trailing zeros. The zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly(Vec<BigRational>);

impl Poly {
    pub fn zero() -> Self {
        Poly(Vec::new())
    }

    pub fn constant(c: BigRational) -> Self {
        Poly(vec![c]).trimmed()
    }

    pub fn epsilon() -> Self {
        Poly(vec![BigRational::zero(), BigRational::one()])
    }

    pub fn from_coefficients(c: Vec<BigRational>) -> Self {
        Poly(c).trimmed()
    }

    fn trimmed(mut self) -> Self {
        while self.0.last().is_some_and(Zero::is_zero) {
            self.0.pop();
        }
        self
    }

    pub fn coefficients(&self) -> &[BigRational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &BigRational {
        self.0.last().expect("zero polynomial has no leading coefficient")
    }

    /// Value at `ε = 0`.
    pub fn at_zero(&self) -> BigRational {
        self.0.first().cloned().unwrap_or_else(BigRational::zero)
    }

    fn add(&self, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let zero = BigRational::zero();
        Poly((0..len)
            .map(|k| self.0.get(k).unwrap_or(&zero) + other.0.get(k).unwrap_or(&zero))
            .collect())
        .trimmed()
    }

    fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|c| -c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![BigRational::zero(); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out).trimmed()
    }

    fn scale(&self, c: &BigRational) -> Poly {
        Poly(self.0.iter().map(|a| a * c).collect()).trimmed()
    }

    /// Euclidean division `self = q * divisor + r`, `deg r < deg divisor`.
    fn div_rem(&self, divisor: &Poly) -> (Poly, Poly) {
        assert!(!divisor.is_zero(), "polynomial division by zero");
        let mut rem = self.0.clone();
        let dl = divisor.0.len();
        if rem.len() < dl {
            return (Poly::zero(), self.clone());
        }
        let mut quot = vec![BigRational::zero(); rem.len() - dl + 1];
        let lead = divisor.lead();
        for k in (0..quot.len()).rev() {
            let c = &rem[k + dl - 1] / lead;
            if !c.is_zero() {
                for (j, d) in divisor.0.iter().enumerate() {
                    rem[k + j] -= &c * d;
                }
            }
            quot[k] = c;
        }
        rem.truncate(dl - 1);
        (Poly(quot).trimmed(), Poly(rem).trimmed())
    }

    fn monic(&self) -> Poly {
        let lead = self.lead().clone();
        Poly(self.0.iter().map(|c| c / &lead).collect())
    }

    /// Monic greatest common divisor.
    fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            a.monic()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DeferredScalar {
    Exact(BigRational),
    /// Reduced `num / den` with monic `den` of positive degree or a numerator
    /// that still depends on `ε`.
    Function { num: Poly, den: Poly },
}

impl DeferredScalar {
    pub fn zero() -> Self {
        DeferredScalar::Exact(BigRational::zero())
    }

    /// The formal parameter that replaces an exact zero pivot.
    pub fn epsilon() -> Self {
        DeferredScalar::Function {
            num: Poly::epsilon(),
            den: Poly::constant(BigRational::one()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            DeferredScalar::Exact(q) => q.is_zero(),
            DeferredScalar::Function { num, .. } => num.is_zero(),
        }
    }

    /// True when the value still depends on `ε`.
    pub fn has_epsilon(&self) -> bool {
        matches!(self, DeferredScalar::Function { .. })
    }

    fn parts(&self) -> (Poly, Poly) {
        match self {
            DeferredScalar::Exact(q) => (Poly::constant(q.clone()), Poly::constant(BigRational::one())),
            DeferredScalar::Function { num, den } => (num.clone(), den.clone()),
        }
    }

    /// Cancels common factors, normalizes the denominator to be monic and
    /// collapses `ε`-free values back to [`DeferredScalar::Exact`].
    fn canonical(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "rational function with zero denominator");
        if num.is_zero() {
            return DeferredScalar::zero();
        }
        let (num, den) = if den.degree() == 0 {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.degree() == 0 {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let lead = den.lead().clone();
        let (num, den) = (num.scale(&lead.recip()), den.monic());
        if num.degree() == 0 && den.degree() == 0 {
            DeferredScalar::Exact(num.at_zero())
        } else {
            DeferredScalar::Function { num, den }
        }
    }

    /// Limit as `ε → 0`, or `None` if the value has a pole there.
    pub fn finalize(&self) -> Option<BigRational> {
        match self {
            DeferredScalar::Exact(q) => Some(q.clone()),
            DeferredScalar::Function { num, den } => {
                let d = den.at_zero();
                if d.is_zero() {
                    None
                } else {
                    Some(num.at_zero() / d)
                }
            }
        }
    }

    /// Whether the limit at `ε → 0` is zero (the value vanishes there).
    pub fn vanishes_at_zero(&self) -> bool {
        match self {
            DeferredScalar::Exact(q) => q.is_zero(),
            DeferredScalar::Function { num, .. } => num.at_zero().is_zero(),
        }
    }
}

impl From<BigRational> for DeferredScalar {
    fn from(q: BigRational) -> Self {
        DeferredScalar::Exact(q)
    }
}

impl fmt::Display for DeferredScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DeferredScalar::Exact(q) => write!(f, "{q}"),
            DeferredScalar::Function { num, den } => {
                write!(f, "({:?}) / ({:?})", num.coefficients(), den.coefficients())
            }
        }
    }
}

impl<'a> Add<&'a DeferredScalar> for &'a DeferredScalar {
    type Output = DeferredScalar;

    fn add(self, rhs: &'a DeferredScalar) -> DeferredScalar {
        if let (DeferredScalar::Exact(a), DeferredScalar::Exact(b)) = (self, rhs) {
            return DeferredScalar::Exact(a + b);
        }
        let ((an, ad), (bn, bd)) = (self.parts(), rhs.parts());
        if ad == bd {
            return DeferredScalar::canonical(an.add(&bn), ad);
        }
        DeferredScalar::canonical(an.mul(&bd).add(&bn.mul(&ad)), ad.mul(&bd))
    }
}

impl Neg for &DeferredScalar {
    type Output = DeferredScalar;

    fn neg(self) -> DeferredScalar {
        match self {
            DeferredScalar::Exact(a) => DeferredScalar::Exact(-a),
            DeferredScalar::Function { num, den } => DeferredScalar::Function {
                num: num.neg(),
                den: den.clone(),
            },
        }
    }
}

impl<'a> Sub<&'a DeferredScalar> for &'a DeferredScalar {
    type Output = DeferredScalar;

    fn sub(self, rhs: &'a DeferredScalar) -> DeferredScalar {
        if let (DeferredScalar::Exact(a), DeferredScalar::Exact(b)) = (self, rhs) {
            return DeferredScalar::Exact(a - b);
        }
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a DeferredScalar> for &'a DeferredScalar {
    type Output = DeferredScalar;

    fn mul(self, rhs: &'a DeferredScalar) -> DeferredScalar {
        if let (DeferredScalar::Exact(a), DeferredScalar::Exact(b)) = (self, rhs) {
            return DeferredScalar::Exact(a * b);
        }
        let ((an, ad), (bn, bd)) = (self.parts(), rhs.parts());
        DeferredScalar::canonical(an.mul(&bn), ad.mul(&bd))
    }
}

impl<'a> Div<&'a DeferredScalar> for &'a DeferredScalar {
    type Output = DeferredScalar;

    /// Panics on division by an exact zero; callers substitute `ε` first.
    fn div(self, rhs: &'a DeferredScalar) -> DeferredScalar {
        assert!(!rhs.is_zero(), "division by an exact zero");
        if let (DeferredScalar::Exact(a), DeferredScalar::Exact(b)) = (self, rhs) {
            return DeferredScalar::Exact(a / b);
        }
        let ((an, ad), (bn, bd)) = (self.parts(), rhs.parts());
        DeferredScalar::canonical(an.mul(&bd), ad.mul(&bn))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn q(n: i64, d: i64) -> DeferredScalar {
        DeferredScalar::Exact(ratio(n, d))
    }

    #[test]
    fn exact_fast_path() {
        let s = &(&q(1, 2) + &q(1, 3)) * &q(6, 1);
        assert_eq!(s, q(5, 1));
        assert!(!s.has_epsilon());
    }

    #[test]
    fn cancellation_returns_to_exact() {
        let e = DeferredScalar::epsilon();
        let one = q(1, 1);
        // (ε² + ε) / ε = ε + 1 and (ε + 1) - ε = 1
        let num = &(&e * &e) + &e;
        let v = &num / &e;
        assert_eq!(v.finalize(), Some(ratio(1, 1)));
        assert_eq!(&v - &e, one);
    }

    #[test]
    fn limit_and_pole() {
        let e = DeferredScalar::epsilon();
        let two = q(2, 1);
        // (2ε + 3ε²) / (5ε) → 2/5
        let v = &(&(&two * &e) + &(&q(3, 1) * &(&e * &e))) / &(&q(5, 1) * &e);
        assert_eq!(v.finalize(), Some(ratio(2, 5)));
        let pole = &two / &e;
        assert_eq!(pole.finalize(), None);
        assert!(e.vanishes_at_zero());
    }

    #[test]
    fn denominator_is_monic() {
        let e = DeferredScalar::epsilon();
        let v = &q(1, 1) / &(&(&q(3, 1) * &e) + &q(6, 1));
        match v {
            DeferredScalar::Function { num, den } => {
                assert_eq!(den.coefficients(), &[ratio(2, 1), ratio(1, 1)]);
                assert_eq!(num.coefficients(), &[ratio(1, 3)]);
            }
            other => panic!("expected a rational function, got {other}"),
        }
    }

    #[test]
    fn polynomial_gcd() {
        // (ε - 1)(ε + 2) and (ε - 1)(ε + 5) share ε - 1.
        let a = Poly::from_coefficients(vec![ratio(-2, 1), ratio(1, 1), ratio(1, 1)]);
        let b = Poly::from_coefficients(vec![ratio(-5, 1), ratio(4, 1), ratio(1, 1)]);
        assert_eq!(a.gcd(&b).coefficients(), &[ratio(-1, 1), ratio(1, 1)]);
    }
}

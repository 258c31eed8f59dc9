//! Floating-point backends for interval bounds.
//!
//! Every backend provides correctly directed rounding for `+ - * /` and
//! `sqrt`. The `f64` backend rounds to nearest in hardware and then uses an
//! error-free transformation (TwoSum, or an FMA residual) to learn the sign
//! of the rounding error; the result is moved one ulp outward only when the
//! rounded value lies on the wrong side of the exact one. No global rounding
//! mode is touched, so evaluation is thread-safe.

use std::fmt;

use num_rational::BigRational;

use super::bigfloat::BigFloat;
use super::precision::PrecisionLevel;

/// Rounding direction of a single operation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Round {
    Down,
    Up,
    Nearest,
}

/// A binary floating-point type usable as an interval bound.
pub trait Scalar: Clone + PartialOrd + PartialEq + fmt::Debug + Send + Sync + 'static {
    /// Exact for every finite `x` when the level has at least 53 bits.
    fn from_f64(x: f64, level: PrecisionLevel) -> Self;
    fn from_rational(r: &BigRational, level: PrecisionLevel, rnd: Round) -> Self;
    fn zero(level: PrecisionLevel) -> Self;
    /// Precision at which new constants interacting with `self` are built.
    fn level(&self) -> PrecisionLevel;
    fn zero_like(&self) -> Self {
        Self::zero(self.level())
    }
    fn one(level: PrecisionLevel) -> Self {
        Self::from_f64(1.0, level)
    }

    /// Exact conversion to the arbitrary precision representation.
    fn to_big(&self) -> BigFloat;
    fn from_big(x: &BigFloat, level: PrecisionLevel, rnd: Round) -> Self;
    fn to_f64(&self, rnd: Round) -> f64;

    fn add_rnd(&self, other: &Self, rnd: Round) -> Self;
    fn sub_rnd(&self, other: &Self, rnd: Round) -> Self;
    fn mul_rnd(&self, other: &Self, rnd: Round) -> Self;
    /// Caller guarantees `other != 0`.
    fn div_rnd(&self, other: &Self, rnd: Round) -> Self;
    /// Caller guarantees `self >= 0`.
    fn sqrt_rnd(&self, rnd: Round) -> Self;

    fn neg_exact(&self) -> Self;
    fn abs_exact(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_finite_val(&self) -> bool;
    fn is_negative(&self) -> bool;

    fn min_of(&self, other: &Self) -> Self {
        if other < self {
            other.clone()
        } else {
            self.clone()
        }
    }

    fn max_of(&self, other: &Self) -> Self {
        if other > self {
            other.clone()
        } else {
            self.clone()
        }
    }
}

// Below this magnitude the FMA residual may itself be rounded.
const TINY: f64 = 1e-290;

#[inline]
fn adjust(r: f64, err_sign: f64, rnd: Round) -> f64 {
    // err_sign > 0 means the exact value lies above r.
    match rnd {
        Round::Nearest => r,
        Round::Down if err_sign < 0.0 => r.next_down(),
        Round::Up if err_sign > 0.0 => r.next_up(),
        _ => r,
    }
}

#[inline]
fn widen(r: f64, rnd: Round) -> f64 {
    match rnd {
        Round::Nearest => r,
        Round::Down => r.next_down(),
        Round::Up => r.next_up(),
    }
}

#[inline]
fn overflow(r: f64, rnd: Round) -> f64 {
    match (rnd, r > 0.0) {
        (Round::Down, true) => f64::MAX,
        (Round::Up, false) => f64::MIN,
        _ => r,
    }
}

#[inline]
fn two_sum_err(a: f64, b: f64, s: f64) -> f64 {
    let bb = s - a;
    (a - (s - bb)) + (b - bb)
}

impl Scalar for f64 {
    fn from_f64(x: f64, _level: PrecisionLevel) -> Self {
        x
    }

    fn from_rational(r: &BigRational, _level: PrecisionLevel, rnd: Round) -> Self {
        BigFloat::from_rational(r, 53, rnd).to_f64(rnd)
    }

    fn zero(_level: PrecisionLevel) -> Self {
        0.0
    }

    fn level(&self) -> PrecisionLevel {
        PrecisionLevel::DOUBLE
    }

    fn to_big(&self) -> BigFloat {
        BigFloat::from_f64(*self, 53)
    }

    fn from_big(x: &BigFloat, _level: PrecisionLevel, rnd: Round) -> Self {
        x.to_f64(rnd)
    }

    fn to_f64(&self, _rnd: Round) -> f64 {
        *self
    }

    fn add_rnd(&self, other: &Self, rnd: Round) -> Self {
        let (a, b) = (*self, *other);
        let s = a + b;
        if !s.is_finite() {
            return overflow(s, rnd);
        }
        adjust(s, two_sum_err(a, b, s), rnd)
    }

    fn sub_rnd(&self, other: &Self, rnd: Round) -> Self {
        self.add_rnd(&-*other, rnd)
    }

    fn mul_rnd(&self, other: &Self, rnd: Round) -> Self {
        let (a, b) = (*self, *other);
        let p = a * b;
        if !p.is_finite() {
            return overflow(p, rnd);
        }
        if a == 0.0 || b == 0.0 {
            return p;
        }
        if p.abs() < TINY {
            return widen(p, rnd);
        }
        adjust(p, a.mul_add(b, -p), rnd)
    }

    fn div_rnd(&self, other: &Self, rnd: Round) -> Self {
        let (a, b) = (*self, *other);
        if a == 0.0 {
            return 0.0;
        }
        let q = a / b;
        if !q.is_finite() {
            return overflow(q, rnd);
        }
        if q.abs() < TINY || a.abs() < TINY || b.abs() > 1e290 {
            return widen(q, rnd);
        }
        // a - q*b is exact; its sign relative to b gives the sign of a/b - q.
        let rem = (-q).mul_add(b, a);
        let err = if b > 0.0 { rem } else { -rem };
        adjust(q, err, rnd)
    }

    fn sqrt_rnd(&self, rnd: Round) -> Self {
        let x = *self;
        if x == 0.0 {
            return 0.0;
        }
        let s = x.sqrt();
        if !s.is_finite() {
            return overflow(s, rnd);
        }
        if x < TINY {
            return widen(s, rnd).max(0.0);
        }
        adjust(s, (-s).mul_add(s, x), rnd)
    }

    fn neg_exact(&self) -> Self {
        -*self
    }

    fn abs_exact(&self) -> Self {
        self.abs()
    }

    fn is_zero(&self) -> bool {
        *self == 0.0
    }

    fn is_finite_val(&self) -> bool {
        self.is_finite()
    }

    fn is_negative(&self) -> bool {
        *self < 0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    fn rat(x: f64) -> BigRational {
        BigFloat::from_f64(x, 53).to_rational()
    }

    fn check_bounds(lo: f64, hi: f64, exact: &BigRational) {
        assert!(rat(lo) <= *exact, "lower bound {lo} above exact");
        assert!(rat(hi) >= *exact, "upper bound {hi} below exact");
    }

    fn finite_f64() -> impl Strategy<Value = f64> {
        prop_oneof![
            -1e6..1e6f64,
            -1.0..1.0f64,
            (-1e3..1e3f64, -60i32..60).prop_map(|(m, e)| m * 2f64.powi(e)),
        ]
    }

    #[test]
    fn exact_operations_are_not_widened() {
        assert_eq!(1.0f64.add_rnd(&2.0, Round::Up), 3.0);
        assert_eq!(1.0f64.add_rnd(&2.0, Round::Down), 3.0);
        assert_eq!(3.0f64.mul_rnd(&4.0, Round::Down), 12.0);
        assert_eq!(1.0f64.div_rnd(&4.0, Round::Up), 0.25);
        assert_eq!(4.0f64.sqrt_rnd(Round::Down), 2.0);
    }

    #[test]
    fn inexact_operations_bracket_the_exact_value() {
        let lo = 1.0f64.div_rnd(&3.0, Round::Down);
        let hi = 1.0f64.div_rnd(&3.0, Round::Up);
        assert_eq!(hi, lo.next_up());
        let third = BigRational::new(BigInt::one(), BigInt::from(3));
        check_bounds(lo, hi, &third);

        let lo = 2.0f64.sqrt_rnd(Round::Down);
        let hi = 2.0f64.sqrt_rnd(Round::Up);
        assert_eq!(hi, lo.next_up());
        assert!(rat(lo) * rat(lo) < BigRational::from_integer(2.into()));
        assert!(rat(hi) * rat(hi) > BigRational::from_integer(2.into()));
    }

    #[test]
    fn rational_conversion_encloses() {
        let tenth = BigRational::new(BigInt::one(), BigInt::from(10));
        let lo = f64::from_rational(&tenth, PrecisionLevel::DOUBLE, Round::Down);
        let hi = f64::from_rational(&tenth, PrecisionLevel::DOUBLE, Round::Up);
        assert_eq!(hi, lo.next_up());
        check_bounds(lo, hi, &tenth);
        let z = f64::from_rational(&BigRational::zero(), PrecisionLevel::DOUBLE, Round::Down);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn overflow_rounds_to_finite_in_the_safe_direction() {
        assert_eq!(f64::MAX.add_rnd(&f64::MAX, Round::Down), f64::MAX);
        assert_eq!(f64::MAX.add_rnd(&f64::MAX, Round::Up), f64::INFINITY);
    }

    proptest! {
        #[test]
        fn add_sub_mul_div_sqrt_bracket_exact(a in finite_f64(), b in finite_f64()) {
            let (ra, rb) = (rat(a), rat(b));
            check_bounds(a.add_rnd(&b, Round::Down), a.add_rnd(&b, Round::Up), &(&ra + &rb));
            check_bounds(a.sub_rnd(&b, Round::Down), a.sub_rnd(&b, Round::Up), &(&ra - &rb));
            check_bounds(a.mul_rnd(&b, Round::Down), a.mul_rnd(&b, Round::Up), &(&ra * &rb));
            if b != 0.0 {
                check_bounds(a.div_rnd(&b, Round::Down), a.div_rnd(&b, Round::Up), &(&ra / &rb));
            }
            let x = a.abs();
            let lo = x.sqrt_rnd(Round::Down);
            let hi = x.sqrt_rnd(Round::Up);
            prop_assert!(rat(lo) * rat(lo) <= rat(x));
            prop_assert!(rat(hi) * rat(hi) >= rat(x));
        }

        #[test]
        fn directed_results_are_within_one_ulp(a in finite_f64(), b in finite_f64()) {
            let lo = a.mul_rnd(&b, Round::Down);
            let hi = a.mul_rnd(&b, Round::Up);
            prop_assert!(lo <= hi);
            prop_assert!(hi == lo || hi == lo.next_up());
        }
    }
}

use std::fmt;

use super::scalar::{Round, Scalar};
use super::{ArithOp, IntervalError};

/// A compact real interval `[lo, hi]` with outward-rounded arithmetic.
#[derive(Clone, PartialEq)]
pub struct RealInterval<S = f64> {
    lo: S,
    hi: S,
}

impl<S: Scalar> RealInterval<S> {
    pub fn new(lo: S, hi: S) -> Result<Self, IntervalError> {
        if !lo.is_finite_val() || !hi.is_finite_val() {
            return Err(IntervalError::NonFinite);
        }
        if lo > hi {
            return Err(IntervalError::InvertedBounds);
        }
        Ok(RealInterval { lo, hi })
    }

    /// Operations use this directly: an overflowing bound may become
    /// infinite, which keeps containment but fails every later test.
    pub(crate) fn from_bounds(lo: S, hi: S) -> Self {
        debug_assert!(lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Greater));
        RealInterval { lo, hi }
    }

    pub fn point(x: S) -> Self {
        RealInterval { lo: x.clone(), hi: x }
    }

    pub fn lo(&self) -> &S {
        &self.lo
    }

    pub fn hi(&self) -> &S {
        &self.hi
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, x: &S) -> bool {
        self.lo <= *x && *x <= self.hi
    }

    pub fn contains_zero(&self) -> bool {
        (self.lo.is_negative() || self.lo.is_zero()) && !self.hi.is_negative()
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    /// `self` lies in the open interior of `other`.
    pub fn is_interior_of(&self, other: &Self) -> bool {
        other.lo < self.lo && self.hi < other.hi
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_bounds(
            self.lo.add_rnd(&other.lo, Round::Down),
            self.hi.add_rnd(&other.hi, Round::Up),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_bounds(
            self.lo.sub_rnd(&other.hi, Round::Down),
            self.hi.sub_rnd(&other.lo, Round::Up),
        )
    }

    pub fn neg(&self) -> Self {
        Self::from_bounds(self.hi.neg_exact(), self.lo.neg_exact())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = pairs[0].0.mul_rnd(pairs[0].1, Round::Down);
        let mut hi = pairs[0].0.mul_rnd(pairs[0].1, Round::Up);
        for (a, b) in &pairs[1..] {
            lo = lo.min_of(&a.mul_rnd(b, Round::Down));
            hi = hi.max_of(&a.mul_rnd(b, Round::Up));
        }
        Self::from_bounds(lo, hi)
    }

    pub fn div(&self, other: &Self) -> Result<Self, IntervalError> {
        if other.contains_zero() {
            return Err(IntervalError::DivisionByZero { op: "real division" });
        }
        let pairs = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo = pairs[0].0.div_rnd(pairs[0].1, Round::Down);
        let mut hi = pairs[0].0.div_rnd(pairs[0].1, Round::Up);
        for (a, b) in &pairs[1..] {
            lo = lo.min_of(&a.div_rnd(b, Round::Down));
            hi = hi.max_of(&a.div_rnd(b, Round::Up));
        }
        Ok(Self::from_bounds(lo, hi))
    }

    /// `{x^2 : x in self}`, tighter than `self.mul(self)` when `0` is inside.
    pub fn square(&self) -> Self {
        if !self.lo.is_negative() {
            Self::from_bounds(
                self.lo.mul_rnd(&self.lo, Round::Down),
                self.hi.mul_rnd(&self.hi, Round::Up),
            )
        } else if !self.hi.is_negative() && !self.hi.is_zero() {
            let a = self.lo.mul_rnd(&self.lo, Round::Up);
            let b = self.hi.mul_rnd(&self.hi, Round::Up);
            Self::from_bounds(self.lo.zero_like(), a.max_of(&b))
        } else {
            Self::from_bounds(
                self.hi.mul_rnd(&self.hi, Round::Down),
                self.lo.mul_rnd(&self.lo, Round::Up),
            )
        }
    }

    /// Upper bound on `max |x|`.
    pub fn mag(&self) -> S {
        self.lo.abs_exact().max_of(&self.hi.abs_exact())
    }

    /// Exact midpoint is not always representable; this rounds to nearest.
    pub fn midpoint(&self) -> S {
        let half = S::from_f64(0.5, self.lo.level());
        self.lo.mul_rnd(&half, Round::Nearest)
            .add_rnd(&self.hi.mul_rnd(&half, Round::Nearest), Round::Nearest)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> S {
        self.hi.sub_rnd(&self.lo, Round::Up)
    }

    pub fn hull(&self, other: &Self) -> Self {
        Self::from_bounds(self.lo.min_of(&other.lo), self.hi.max_of(&other.hi))
    }
}

impl<S: Scalar> fmt::Debug for RealInterval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}, {:?}]", self.lo, self.hi)
    }
}

/// `X op Y` for one of the four arithmetic operations.
pub fn real_op<S: Scalar>(
    op: ArithOp,
    x: &RealInterval<S>,
    y: &RealInterval<S>,
) -> Result<RealInterval<S>, IntervalError> {
    Ok(match op {
        ArithOp::Add => x.add(y),
        ArithOp::Sub => x.sub(y),
        ArithOp::Mul => x.mul(y),
        ArithOp::Div => x.div(y)?,
    })
}

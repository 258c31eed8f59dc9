use std::fmt;

use super::real::RealInterval;
use super::scalar::{Round, Scalar};
use super::{ArithOp, IntervalError, PrecisionLevel};

/// A complex point, evaluated with round-to-nearest arithmetic.
#[derive(Clone, PartialEq)]
pub struct Complex<S = f64> {
    pub re: S,
    pub im: S,
}

impl<S: Scalar> Complex<S> {
    pub fn new(re: S, im: S) -> Self {
        Complex { re, im }
    }

    pub fn from_f64(re: f64, im: f64, level: PrecisionLevel) -> Self {
        Complex::new(S::from_f64(re, level), S::from_f64(im, level))
    }

    pub fn zero(level: PrecisionLevel) -> Self {
        Complex::new(S::zero(level), S::zero(level))
    }

    pub fn one(level: PrecisionLevel) -> Self {
        Complex::new(S::one(level), S::zero(level))
    }

    pub fn level(&self) -> PrecisionLevel {
        self.re.level().max(self.im.level())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn add(&self, o: &Self) -> Self {
        Complex::new(
            self.re.add_rnd(&o.re, Round::Nearest),
            self.im.add_rnd(&o.im, Round::Nearest),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Complex::new(
            self.re.sub_rnd(&o.re, Round::Nearest),
            self.im.sub_rnd(&o.im, Round::Nearest),
        )
    }

    pub fn neg(&self) -> Self {
        Complex::new(self.re.neg_exact(), self.im.neg_exact())
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = Round::Nearest;
        Complex::new(
            self.re.mul_rnd(&o.re, n).sub_rnd(&self.im.mul_rnd(&o.im, n), n),
            self.re.mul_rnd(&o.im, n).add_rnd(&self.im.mul_rnd(&o.re, n), n),
        )
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// `None` when `o` is exactly zero.
    pub fn div(&self, o: &Self) -> Option<Self> {
        if o.is_zero() {
            return None;
        }
        let n = Round::Nearest;
        // Scale by the larger component to avoid overflow in |o|^2.
        if o.re.abs_exact() >= o.im.abs_exact() {
            let ratio = o.im.div_rnd(&o.re, n);
            let den = o.re.add_rnd(&o.im.mul_rnd(&ratio, n), n);
            Some(Complex::new(
                self.re.add_rnd(&self.im.mul_rnd(&ratio, n), n).div_rnd(&den, n),
                self.im.sub_rnd(&self.re.mul_rnd(&ratio, n), n).div_rnd(&den, n),
            ))
        } else {
            let ratio = o.re.div_rnd(&o.im, n);
            let den = o.re.mul_rnd(&ratio, n).add_rnd(&o.im, n);
            Some(Complex::new(
                self.re.mul_rnd(&ratio, n).add_rnd(&self.im, n).div_rnd(&den, n),
                self.im.mul_rnd(&ratio, n).sub_rnd(&self.re, n).div_rnd(&den, n),
            ))
        }
    }

    pub fn abs(&self) -> S {
        let n = Round::Nearest;
        self.re
            .mul_rnd(&self.re, n)
            .add_rnd(&self.im.mul_rnd(&self.im, n), n)
            .sqrt_rnd(n)
    }

    /// `max(|re|, |im|)`, used for cheap norms in stopping rules.
    pub fn max_component(&self) -> S {
        self.re.abs_exact().max_of(&self.im.abs_exact())
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.re.to_f64(Round::Nearest), self.im.to_f64(Round::Nearest))
    }

    pub fn convert<T: Scalar>(&self, level: PrecisionLevel) -> Complex<T> {
        Complex::new(
            T::from_big(&self.re.to_big(), level, Round::Nearest),
            T::from_big(&self.im.to_big(), level, Round::Nearest),
        )
    }
}

impl<S: Scalar> fmt::Debug for Complex<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

/// A rectangular complex interval `re + i·im`.
#[derive(Clone, PartialEq)]
pub struct ComplexInterval<S = f64> {
    pub re: RealInterval<S>,
    pub im: RealInterval<S>,
}

impl<S: Scalar> ComplexInterval<S> {
    pub fn new(re: RealInterval<S>, im: RealInterval<S>) -> Self {
        ComplexInterval { re, im }
    }

    pub fn point(z: &Complex<S>) -> Self {
        ComplexInterval::new(
            RealInterval::point(z.re.clone()),
            RealInterval::point(z.im.clone()),
        )
    }

    pub fn real(re: RealInterval<S>) -> Self {
        let zero = re.lo().zero_like();
        ComplexInterval::new(re, RealInterval::point(zero))
    }

    pub fn zero(level: PrecisionLevel) -> Self {
        ComplexInterval::point(&Complex::zero(level))
    }

    pub fn contains(&self, z: &Complex<S>) -> bool {
        self.re.contains(&z.re) && self.im.contains(&z.im)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.re.is_subset_of(&other.re) && self.im.is_subset_of(&other.im)
    }

    pub fn is_interior_of(&self, other: &Self) -> bool {
        self.re.is_interior_of(&other.re) && self.im.is_interior_of(&other.im)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        self.re.intersects(&other.re) && self.im.intersects(&other.im)
    }

    pub fn contains_zero(&self) -> bool {
        self.re.contains_zero() && self.im.contains_zero()
    }

    pub fn conj(&self) -> Self {
        ComplexInterval::new(self.re.clone(), self.im.neg())
    }

    pub fn midpoint(&self) -> Complex<S> {
        Complex::new(self.re.midpoint(), self.im.midpoint())
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexInterval::new(self.re.add(&o.re), self.im.add(&o.im))
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexInterval::new(self.re.sub(&o.re), self.im.sub(&o.im))
    }

    pub fn neg(&self) -> Self {
        ComplexInterval::new(self.re.neg(), self.im.neg())
    }

    /// `(X·W − Y·Z) + i(X·Z + Y·W)`.
    pub fn mul(&self, o: &Self) -> Self {
        let (x, y) = (&self.re, &self.im);
        let (w, z) = (&o.re, &o.im);
        ComplexInterval::new(x.mul(w).sub(&y.mul(z)), x.mul(z).add(&y.mul(w)))
    }

    /// `(X² − Y²) + i·2XY`, using the real square primitive.
    pub fn square(&self) -> Self {
        let xy = self.re.mul(&self.im);
        ComplexInterval::new(self.re.square().sub(&self.im.square()), xy.add(&xy))
    }

    /// `(X·W + Y·Z)/(W² + Z²) + i(Y·W − X·Z)/(W² + Z²)`.
    pub fn div(&self, o: &Self) -> Result<Self, IntervalError> {
        let (x, y) = (&self.re, &self.im);
        let (w, z) = (&o.re, &o.im);
        let den = w.square().add(&z.square());
        if den.contains_zero() {
            return Err(IntervalError::DivisionByZero { op: "complex division" });
        }
        let re = x.mul(w).add(&y.mul(z)).div(&den)?;
        let im = y.mul(w).sub(&x.mul(z)).div(&den)?;
        Ok(ComplexInterval::new(re, im))
    }

    /// Upper bound on `max { |z| : z in self }`.
    pub fn mag(&self) -> S {
        let a = self.re.mag();
        let b = self.im.mag();
        a.mul_rnd(&a, Round::Up)
            .add_rnd(&b.mul_rnd(&b, Round::Up), Round::Up)
            .sqrt_rnd(Round::Up)
    }

    pub fn convert<T: Scalar>(&self, level: PrecisionLevel) -> ComplexInterval<T> {
        let conv = |r: &RealInterval<S>| {
            RealInterval::from_bounds(
                T::from_big(&r.lo().to_big(), level, Round::Down),
                T::from_big(&r.hi().to_big(), level, Round::Up),
            )
        };
        ComplexInterval::new(conv(&self.re), conv(&self.im))
    }
}

impl<S: Scalar> fmt::Debug for ComplexInterval<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} + i{:?}", self.re, self.im)
    }
}

/// `I op J` using the rectangular formulas built on real interval operations.
pub fn complex_op<S: Scalar>(
    op: ArithOp,
    i: &ComplexInterval<S>,
    j: &ComplexInterval<S>,
) -> Result<ComplexInterval<S>, IntervalError> {
    Ok(match op {
        ArithOp::Add => i.add(j),
        ArithOp::Sub => i.sub(j),
        ArithOp::Mul => i.mul(j),
        ArithOp::Div => i.div(j)?,
    })
}

/// Upper bound on `max |z|` over the rectangle.
pub fn mag<S: Scalar>(i: &ComplexInterval<S>) -> S {
    i.mag()
}

//! Arbitrary precision binary floating point with directed rounding.
//!
//! A value is `(-1)^neg * mant * 2^exp` with an odd (or zero) mantissa of at
//! most `prec` bits. Every operation computes the exact result (or the exact
//! truncated quotient/root plus a sticky bit) and rounds it once, so all four
//! rounding directions are correctly rounded.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::precision::{pow2, PrecisionLevel};
use super::scalar::{Round, Scalar};

#[derive(Clone)]
pub struct BigFloat {
    neg: bool,
    mant: BigUint,
    exp: i64,
    prec: u32,
}

impl BigFloat {
    pub fn zero(prec: u32) -> Self {
        BigFloat {
            neg: false,
            mant: BigUint::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Rounds `(-1)^neg * mant * 2^exp` to `prec` bits.
    fn from_parts(neg: bool, mant: BigUint, exp: i64, prec: u32, rnd: Round) -> Self {
        if mant.is_zero() {
            return Self::zero(prec);
        }
        let bits = mant.bits();
        let (mut m, mut e) = if bits > prec as u64 {
            let shift = bits - prec as u64;
            let tz = mant.trailing_zeros().unwrap_or(0);
            let inexact = tz < shift;
            let mut q = &mant >> shift;
            let bump = match rnd {
                Round::Up => !neg && inexact,
                Round::Down => neg && inexact,
                Round::Nearest => {
                    let half = mant.bit(shift - 1);
                    let sticky = tz < shift - 1;
                    half && (sticky || q.bit(0))
                }
            };
            if bump {
                q += 1u32;
            }
            (q, exp + shift as i64)
        } else {
            (mant, exp)
        };
        let tz = m.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            m >>= tz;
            e += tz as i64;
        }
        BigFloat {
            neg,
            mant: m,
            exp: e,
            prec,
        }
    }

    /// Exact for `prec >= 53`; rounds to nearest otherwise.
    pub fn from_f64(x: f64, prec: u32) -> Self {
        assert!(x.is_finite(), "BigFloat::from_f64 on non-finite value");
        if x == 0.0 {
            return Self::zero(prec);
        }
        let bits = x.to_bits();
        let neg = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mant, exp) = if biased == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), biased - 1075)
        };
        Self::from_parts(neg, BigUint::from(mant), exp, prec, Round::Nearest)
    }

    pub fn from_rational(r: &BigRational, prec: u32, rnd: Round) -> Self {
        if r.is_zero() {
            return Self::zero(prec);
        }
        let neg = r.is_negative();
        let num = r.numer().magnitude().clone();
        let den = r.denom().magnitude().clone();
        Self::quotient(neg, num, 0, den, 0, prec, rnd)
    }

    // Correctly rounded (num * 2^ne) / (den * 2^de).
    fn quotient(
        neg: bool,
        num: BigUint,
        ne: i64,
        den: BigUint,
        de: i64,
        prec: u32,
        rnd: Round,
    ) -> Self {
        let want = prec as i64 + 2 + den.bits() as i64 - num.bits() as i64;
        let k = want.max(0);
        let (mut q, r) = (num << k as u64).div_rem(&den);
        let mut exp = ne - de - k;
        if !r.is_zero() {
            q = (q << 1u32) | BigUint::one();
            exp -= 1;
        }
        Self::from_parts(neg, q, exp, prec, rnd)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.mant.is_zero() {
            return BigRational::zero();
        }
        let sign = if self.neg { Sign::Minus } else { Sign::Plus };
        let m = BigInt::from_biguint(sign, self.mant.clone());
        if self.exp >= 0 {
            BigRational::from_integer(m << self.exp as u64)
        } else {
            BigRational::new(m, BigInt::one() << (-self.exp) as u64)
        }
    }

    /// Directed conversion to `f64`; overflow saturates to `±MAX` or `±inf`
    /// in the requested direction and underflow rounds onto the subnormal
    /// grid.
    pub fn to_f64(&self, rnd: Round) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let r = Self::from_parts(self.neg, self.mant.clone(), self.exp, 53, rnd);
        let top = r.exp + r.mant.bits() as i64;
        let away = match rnd {
            Round::Up => !r.neg,
            Round::Down => r.neg,
            Round::Nearest => false,
        };
        let sign = if r.neg { -1.0 } else { 1.0 };
        if top > 1024 {
            return if away || rnd == Round::Nearest {
                sign * f64::INFINITY
            } else {
                sign * f64::MAX
            };
        }
        if top < -1021 {
            // Subnormal range: integer multiples of 2^-1074.
            let k = r.exp + 1074;
            let units = if k >= 0 {
                r.mant.to_u64().expect("subnormal mantissa") << k
            } else if -k >= 64 {
                u64::from(away)
            } else {
                let m = r.mant.to_u64().expect("53-bit mantissa");
                let q = m >> -k;
                let inexact = q << -k != m;
                q + u64::from(inexact && away)
            };
            return sign * f64::from_bits(units);
        }
        // Mantissa fits in 53 bits and the value is normal, so this is exact.
        let m = r.mant.to_u64().expect("53-bit mantissa") as f64;
        let e = r.exp;
        let half = (e / 2) as i32;
        sign * m * pow2(half) * pow2(e as i32 - half)
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.neg
    }

    fn top(&self) -> i64 {
        self.exp + self.mant.bits() as i64
    }

    fn cmp_magnitude(&self, other: &Self) -> Ordering {
        match (self.mant.is_zero(), other.mant.is_zero()) {
            (true, true) => return Ordering::Equal,
            (true, false) => return Ordering::Less,
            (false, true) => return Ordering::Greater,
            _ => {}
        }
        match self.top().cmp(&other.top()) {
            Ordering::Equal => {}
            ord => return ord,
        }
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        a.cmp(&b)
    }

    pub fn add(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        if other.mant.is_zero() {
            return Self::from_parts(self.neg, self.mant.clone(), self.exp, prec, rnd);
        }
        if self.mant.is_zero() {
            return Self::from_parts(other.neg, other.mant.clone(), other.exp, prec, rnd);
        }
        let (big, small) = if self.top() >= other.top() {
            (self, other)
        } else {
            (other, self)
        };
        // An addend far below the rounding position only contributes its sign.
        let limit = big.exp.min(big.top() - prec as i64 - 3);
        let sticky;
        let small = if small.top() < limit {
            sticky = BigFloat {
                neg: small.neg,
                mant: BigUint::one(),
                exp: limit - 1,
                prec,
            };
            &sticky
        } else {
            small
        };
        let e = big.exp.min(small.exp);
        let a = &big.mant << (big.exp - e) as u64;
        let b = &small.mant << (small.exp - e) as u64;
        if big.neg == small.neg {
            return Self::from_parts(big.neg, a + b, e, prec, rnd);
        }
        match a.cmp(&b) {
            Ordering::Equal => Self::zero(prec),
            Ordering::Greater => Self::from_parts(big.neg, a - b, e, prec, rnd),
            Ordering::Less => Self::from_parts(small.neg, b - a, e, prec, rnd),
        }
    }

    pub fn neg(&self) -> Self {
        let mut r = self.clone();
        if !r.mant.is_zero() {
            r.neg = !r.neg;
        }
        r
    }

    pub fn mul(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        Self::from_parts(
            self.neg != other.neg,
            &self.mant * &other.mant,
            self.exp + other.exp,
            prec,
            rnd,
        )
    }

    pub fn div(&self, other: &Self, prec: u32, rnd: Round) -> Self {
        assert!(!other.mant.is_zero(), "BigFloat division by zero");
        if self.mant.is_zero() {
            return Self::zero(prec);
        }
        Self::quotient(
            self.neg != other.neg,
            self.mant.clone(),
            self.exp,
            other.mant.clone(),
            other.exp,
            prec,
            rnd,
        )
    }

    pub fn sqrt(&self, prec: u32, rnd: Round) -> Self {
        assert!(!self.neg, "BigFloat sqrt of negative value");
        if self.mant.is_zero() {
            return Self::zero(prec);
        }
        let want = 2 * prec as i64 + 4 - self.mant.bits() as i64;
        let mut k = want.max(0);
        if (self.exp - k).rem_euclid(2) != 0 {
            k += 1;
        }
        let n = &self.mant << k as u64;
        let mut s = n.sqrt();
        let mut exp = (self.exp - k) / 2;
        if &s * &s != n {
            s = (s << 1u32) | BigUint::one();
            exp -= 1;
        }
        Self::from_parts(false, s, exp, prec, rnd)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.neg == other.neg && self.mant == other.mant && self.exp == other.exp
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        let a_neg = self.neg && !self.mant.is_zero();
        let b_neg = other.neg && !other.mant.is_zero();
        Some(match (a_neg, b_neg) {
            (false, true) => Ordering::Greater,
            (true, false) => Ordering::Less,
            (false, false) => self.cmp_magnitude(other),
            (true, true) => other.cmp_magnitude(self),
        })
    }
}

impl fmt::Debug for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BigFloat({}{}*2^{}, {} bits)",
            if self.neg { "-" } else { "" },
            self.mant,
            self.exp,
            self.prec
        )
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:e}", self.to_f64(Round::Nearest))
    }
}

impl Scalar for BigFloat {
    fn from_f64(x: f64, level: PrecisionLevel) -> Self {
        BigFloat::from_f64(x, level.significand_bits().max(53))
    }

    fn from_rational(r: &BigRational, level: PrecisionLevel, rnd: Round) -> Self {
        BigFloat::from_rational(r, level.significand_bits(), rnd)
    }

    fn zero(level: PrecisionLevel) -> Self {
        BigFloat::zero(level.significand_bits())
    }

    fn level(&self) -> PrecisionLevel {
        PrecisionLevel::new(self.prec).expect("BigFloat precision is at least 2 bits")
    }

    fn to_big(&self) -> BigFloat {
        self.clone()
    }

    fn from_big(x: &BigFloat, level: PrecisionLevel, rnd: Round) -> Self {
        Self::from_parts(x.neg, x.mant.clone(), x.exp, level.significand_bits(), rnd)
    }

    fn to_f64(&self, rnd: Round) -> f64 {
        BigFloat::to_f64(self, rnd)
    }

    fn add_rnd(&self, other: &Self, rnd: Round) -> Self {
        self.add(other, self.prec.max(other.prec), rnd)
    }

    fn sub_rnd(&self, other: &Self, rnd: Round) -> Self {
        self.add(&other.neg(), self.prec.max(other.prec), rnd)
    }

    fn mul_rnd(&self, other: &Self, rnd: Round) -> Self {
        self.mul(other, self.prec.max(other.prec), rnd)
    }

    fn div_rnd(&self, other: &Self, rnd: Round) -> Self {
        self.div(other, self.prec.max(other.prec), rnd)
    }

    fn sqrt_rnd(&self, rnd: Round) -> Self {
        self.sqrt(self.prec, rnd)
    }

    fn neg_exact(&self) -> Self {
        self.neg()
    }

    fn abs_exact(&self) -> Self {
        let mut r = self.clone();
        r.neg = false;
        r
    }

    fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    fn is_finite_val(&self) -> bool {
        true
    }

    fn is_negative(&self) -> bool {
        self.neg && !self.mant.is_zero()
    }
}

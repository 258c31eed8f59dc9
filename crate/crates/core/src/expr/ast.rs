use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// An exact complex rational `re + i·im`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CRational {
    pub re: BigRational,
    pub im: BigRational,
}

impl CRational {
    pub fn new(re: BigRational, im: BigRational) -> Self {
        CRational { re, im }
    }

    pub fn real(re: BigRational) -> Self {
        CRational::new(re, BigRational::zero())
    }

    pub fn from_int(n: i64) -> Self {
        CRational::real(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn zero() -> Self {
        CRational::from_int(0)
    }

    pub fn one() -> Self {
        CRational::from_int(1)
    }

    pub fn imaginary_unit() -> Self {
        CRational::new(BigRational::zero(), BigRational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.re.is_one() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    /// True when `-self` is the canonical stored form: negative real part,
    /// or zero real part and negative imaginary part.
    pub fn is_negative_form(&self) -> bool {
        self.re.is_negative() || (self.re.is_zero() && self.im.is_negative())
    }

    pub fn add(&self, o: &Self) -> Self {
        CRational::new(&self.re + &o.re, &self.im + &o.im)
    }

    pub fn sub(&self, o: &Self) -> Self {
        CRational::new(&self.re - &o.re, &self.im - &o.im)
    }

    pub fn neg(&self) -> Self {
        CRational::new(-&self.re, -&self.im)
    }

    pub fn mul(&self, o: &Self) -> Self {
        CRational::new(
            &self.re * &o.re - &self.im * &o.im,
            &self.re * &o.im + &self.im * &o.re,
        )
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let den = &self.re * &self.re + &self.im * &self.im;
        Some(CRational::new(&self.re / &den, -&self.im / &den))
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        o.inv().map(|r| self.mul(&r))
    }

    pub fn pow(&self, k: i32) -> Option<Self> {
        let base = if k < 0 { self.inv()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = CRational::one();
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        Some(acc)
    }
}

impl fmt::Debug for CRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else {
            write!(f, "({} + {}i)", self.re, self.im)
        }
    }
}

/// Expression tree over the system variables, constants already folded.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(CRational),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, i32),
}

impl Expr {
    pub fn as_const(&self) -> Option<&CRational> {
        match self {
            Expr::Const(c) => Some(c),
            _ => None,
        }
    }

    /// Exact value at a rational point; `None` on division by zero.
    pub fn eval_exact(&self, x: &[CRational]) -> Option<CRational> {
        Some(match self {
            Expr::Const(c) => c.clone(),
            Expr::Var(k) => x[*k].clone(),
            Expr::Add(a, b) => a.eval_exact(x)?.add(&b.eval_exact(x)?),
            Expr::Sub(a, b) => a.eval_exact(x)?.sub(&b.eval_exact(x)?),
            Expr::Mul(a, b) => a.eval_exact(x)?.mul(&b.eval_exact(x)?),
            Expr::Div(a, b) => a.eval_exact(x)?.div(&b.eval_exact(x)?)?,
            Expr::Neg(a) => a.eval_exact(x)?.neg(),
            Expr::Pow(a, k) => a.eval_exact(x)?.pow(*k)?,
        })
    }

    /// Calls `f` on every constant in the tree.
    pub fn visit_constants(&self, f: &mut impl FnMut(&CRational)) {
        match self {
            Expr::Const(c) => f(c),
            Expr::Var(_) => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.visit_constants(f);
                b.visit_constants(f);
            }
            Expr::Neg(a) | Expr::Pow(a, _) => a.visit_constants(f),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CoefficientKind {
    Real,
    Complex,
}

/// A parsed square system.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpressionSystem {
    pub variables: Vec<String>,
    pub expressions: Vec<Expr>,
    pub coefficient_kind: CoefficientKind,
}

impl ExpressionSystem {
    /// Builds a system and derives its coefficient kind from the constants.
    pub fn new(variables: Vec<String>, expressions: Vec<Expr>) -> Self {
        let mut real = true;
        for e in &expressions {
            e.visit_constants(&mut |c| real &= c.is_real());
        }
        let coefficient_kind = if real { CoefficientKind::Real } else { CoefficientKind::Complex };
        ExpressionSystem { variables, expressions, coefficient_kind }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }
}

use std::fmt;

use crate::interval::{
    Complex, ComplexInterval, IntervalBox, IntervalError, PrecisionLevel, RealInterval, Round, Scalar,
};

use super::ast::CRational;
use super::EvalError;

/// One tape instruction. Operands are slot indices; slots `0..n` hold the
/// inputs and instruction `k` writes slot `n + k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Instr {
    /// Load entry of the constant pool.
    Const(usize),
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    Div(usize, usize),
    Neg(usize),
    Square(usize),
}

impl Instr {
    pub fn operands(&self) -> (Option<usize>, Option<usize>) {
        match *self {
            Instr::Const(_) => (None, None),
            Instr::Neg(a) | Instr::Square(a) => (Some(a), None),
            Instr::Add(a, b) | Instr::Sub(a, b) | Instr::Mul(a, b) | Instr::Div(a, b) => (Some(a), Some(b)),
        }
    }

    pub(crate) fn map_operands(&self, f: impl Fn(usize) -> usize) -> Instr {
        match *self {
            Instr::Const(c) => Instr::Const(c),
            Instr::Add(a, b) => Instr::Add(f(a), f(b)),
            Instr::Sub(a, b) => Instr::Sub(f(a), f(b)),
            Instr::Mul(a, b) => Instr::Mul(f(a), f(b)),
            Instr::Div(a, b) => Instr::Div(f(a), f(b)),
            Instr::Neg(a) => Instr::Neg(f(a)),
            Instr::Square(a) => Instr::Square(f(a)),
        }
    }

    pub fn is_mul(&self) -> bool {
        matches!(self, Instr::Mul(..) | Instr::Square(_))
    }

    pub fn is_add(&self) -> bool {
        matches!(self, Instr::Add(..) | Instr::Sub(..))
    }
}

/// Source of an output value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Output {
    Slot(usize),
    /// Structural zero, produced without touching the tape.
    Zero,
}

/// A straight-line program evaluating `C^n -> C^m`.
#[derive(Clone, PartialEq)]
pub struct SlpProgram {
    pub(crate) n_inputs: usize,
    pub(crate) instrs: Vec<Instr>,
    pub(crate) consts: Vec<CRational>,
    pub(crate) outputs: Vec<Output>,
}

impl SlpProgram {
    pub fn new(
        n_inputs: usize,
        instrs: Vec<Instr>,
        consts: Vec<CRational>,
        outputs: Vec<Output>,
    ) -> Result<Self, String> {
        for (k, ins) in instrs.iter().enumerate() {
            let limit = n_inputs + k;
            let (a, b) = ins.operands();
            if a.is_some_and(|s| s >= limit) || b.is_some_and(|s| s >= limit) {
                return Err(format!("instruction {k} reads a later slot"));
            }
            if let Instr::Const(c) = ins {
                if *c >= consts.len() {
                    return Err(format!("instruction {k} loads missing constant {c}"));
                }
            }
        }
        for o in &outputs {
            if let Output::Slot(s) = o {
                if *s >= n_inputs + instrs.len() {
                    return Err(format!("output reads missing slot {s}"));
                }
            }
        }
        Ok(SlpProgram { n_inputs, instrs, consts, outputs })
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.outputs.len()
    }

    pub fn instructions(&self) -> &[Instr] {
        &self.instrs
    }

    pub fn constants(&self) -> &[CRational] {
        &self.consts
    }

    pub fn outputs(&self) -> &[Output] {
        &self.outputs
    }

    pub fn workspace_size(&self) -> usize {
        self.n_inputs + self.instrs.len()
    }

    pub fn count_muls(&self) -> usize {
        self.instrs.iter().filter(|i| i.is_mul()).count()
    }

    pub fn count_adds(&self) -> usize {
        self.instrs.iter().filter(|i| i.is_add()).count()
    }

    /// Rounds the constant pool for evaluation at `level`.
    pub fn prepare<S: Scalar>(&self, level: PrecisionLevel) -> PreparedSlp<'_, S> {
        let consts = self
            .consts
            .iter()
            .map(|c| {
                let part = |r| {
                    let lo = S::from_rational(r, level, Round::Down);
                    let hi = S::from_rational(r, level, Round::Up);
                    let mid = S::from_rational(r, level, Round::Nearest);
                    (RealInterval::new(lo, hi).expect("finite constant"), mid)
                };
                let (re, re_mid) = part(&c.re);
                let (im, im_mid) = part(&c.im);
                PreparedConst { point: Complex::new(re_mid, im_mid), enclosure: ComplexInterval::new(re, im) }
            })
            .collect();
        PreparedSlp { slp: self, level, consts }
    }
}

impl fmt::Debug for SlpProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "inputs: {}", self.n_inputs)?;
        for (k, ins) in self.instrs.iter().enumerate() {
            let slot = self.n_inputs + k;
            match ins {
                Instr::Const(c) => writeln!(f, "  t{slot} = {:?}", self.consts[*c])?,
                other => writeln!(f, "  t{slot} = {other:?}")?,
            }
        }
        write!(f, "outputs: {:?}", self.outputs)
    }
}

/// Constant rounded to a precision: nearest value for point evaluation and
/// an enclosing interval for interval evaluation.
#[derive(Clone)]
pub struct PreparedConst<S> {
    pub point: Complex<S>,
    pub enclosure: ComplexInterval<S>,
}

/// Value type a tape can be evaluated over.
pub trait TapeValue<S: Scalar>: Clone {
    fn constant(c: &PreparedConst<S>) -> Self;
    fn zero(level: PrecisionLevel) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn square(&self) -> Self;
    fn div(&self, o: &Self, instr: usize) -> Result<Self, EvalError>;
}

impl<S: Scalar> TapeValue<S> for Complex<S> {
    fn constant(c: &PreparedConst<S>) -> Self {
        c.point.clone()
    }
    fn zero(level: PrecisionLevel) -> Self {
        Complex::zero(level)
    }
    fn add(&self, o: &Self) -> Self {
        Complex::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        Complex::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        Complex::mul(self, o)
    }
    fn neg(&self) -> Self {
        Complex::neg(self)
    }
    fn square(&self) -> Self {
        Complex::square(self)
    }
    fn div(&self, o: &Self, instr: usize) -> Result<Self, EvalError> {
        Complex::div(self, o).ok_or(EvalError::DivisionByZero { instr })
    }
}

impl<S: Scalar> TapeValue<S> for ComplexInterval<S> {
    fn constant(c: &PreparedConst<S>) -> Self {
        c.enclosure.clone()
    }
    fn zero(level: PrecisionLevel) -> Self {
        ComplexInterval::zero(level)
    }
    fn add(&self, o: &Self) -> Self {
        ComplexInterval::add(self, o)
    }
    fn sub(&self, o: &Self) -> Self {
        ComplexInterval::sub(self, o)
    }
    fn mul(&self, o: &Self) -> Self {
        ComplexInterval::mul(self, o)
    }
    fn neg(&self) -> Self {
        ComplexInterval::neg(self)
    }
    fn square(&self) -> Self {
        ComplexInterval::square(self)
    }
    fn div(&self, o: &Self, instr: usize) -> Result<Self, EvalError> {
        ComplexInterval::div(self, o).map_err(|e| match e {
            IntervalError::DivisionByZero { .. } => EvalError::Enclosure { instr },
            other => EvalError::Interval(other),
        })
    }
}

/// A program with constants rounded for one precision level.
pub struct PreparedSlp<'a, S> {
    slp: &'a SlpProgram,
    level: PrecisionLevel,
    consts: Vec<PreparedConst<S>>,
}

impl<'a, S: Scalar> PreparedSlp<'a, S> {
    pub fn program(&self) -> &SlpProgram {
        self.slp
    }

    pub fn level(&self) -> PrecisionLevel {
        self.level
    }

    /// Runs the tape over `inputs`, reusing `work` as the slot buffer.
    pub fn eval<T: TapeValue<S>>(&self, inputs: &[T], work: &mut Vec<T>) -> Result<Vec<T>, EvalError> {
        let slp = self.slp;
        if inputs.len() != slp.n_inputs {
            return Err(EvalError::Arity { expected: slp.n_inputs, found: inputs.len() });
        }
        work.clear();
        work.extend_from_slice(inputs);
        for (k, ins) in slp.instrs.iter().enumerate() {
            let v = match *ins {
                Instr::Const(c) => T::constant(&self.consts[c]),
                Instr::Add(a, b) => work[a].add(&work[b]),
                Instr::Sub(a, b) => work[a].sub(&work[b]),
                Instr::Mul(a, b) => work[a].mul(&work[b]),
                Instr::Div(a, b) => work[a].div(&work[b], k)?,
                Instr::Neg(a) => work[a].neg(),
                Instr::Square(a) => work[a].square(),
            };
            work.push(v);
        }
        Ok(slp
            .outputs
            .iter()
            .map(|o| match o {
                Output::Slot(s) => work[*s].clone(),
                Output::Zero => T::zero(self.level),
            })
            .collect())
    }

    pub fn eval_point(&self, x: &[Complex<S>]) -> Result<Vec<Complex<S>>, EvalError> {
        self.eval(x, &mut Vec::with_capacity(self.slp.workspace_size()))
    }

    pub fn eval_interval(&self, x: &IntervalBox<S>) -> Result<Vec<ComplexInterval<S>>, EvalError> {
        self.eval(x.entries(), &mut Vec::with_capacity(self.slp.workspace_size()))
    }
}

/// Double precision point evaluation. No containment guarantee.
pub fn eval_point(slp: &SlpProgram, x: &[Complex]) -> Result<Vec<Complex>, EvalError> {
    slp.prepare::<f64>(PrecisionLevel::DOUBLE).eval_point(x)
}

/// Double precision interval enclosure of the program over `x`.
pub fn eval_interval(slp: &SlpProgram, x: &IntervalBox) -> Result<IntervalBox, EvalError> {
    let out = slp.prepare::<f64>(PrecisionLevel::DOUBLE).eval_interval(x)?;
    IntervalBox::new(out).map_err(EvalError::Interval)
}

//! Polynomial and rational systems: parsing, compilation to straight-line
//! programs, and evaluation over points and interval boxes.
//!
//! Interval results depend on the tape and not only on the polynomial it
//! computes. `(x+y)·z` and `x·z + y·z` agree on points but give different
//! enclosures on the same box.

mod ast;
mod builder;
mod jacobian;
mod parse;
mod poly;
mod slp;

use thiserror::Error;

use crate::interval::{ComplexInterval, IntervalBox, IntervalError, PrecisionLevel, RealInterval, Round, Scalar};

pub use ast::{CRational, CoefficientKind, Expr, ExpressionSystem};
pub use jacobian::differentiate;
pub use parse::parse_system;
pub use slp::{eval_interval, eval_point, Instr, Output, PreparedConst, PreparedSlp, SlpProgram, TapeValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("line {line}, column {column}: undeclared identifier '{name}'")]
    UndeclaredIdentifier { name: String, line: usize, column: usize },
    #[error("line {line}: '{name}' is declared twice")]
    DuplicateName { name: String, line: usize },
    #[error("line {line}: expected a 'variables:' line first")]
    MissingVariables { line: usize },
    #[error("line {line}, column {column}: division by constant zero")]
    ConstantDivisionByZero { line: usize, column: usize },
    #[error("system is not square: {variables} variables but {equations} equations")]
    NonSquare { variables: usize, equations: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("expected {expected} inputs, found {found}")]
    Arity { expected: usize, found: usize },
    #[error("division by zero at instruction {instr}")]
    DivisionByZero { instr: usize },
    #[error("enclosure failure: divisor interval contains zero at instruction {instr}")]
    Enclosure { instr: usize },
    #[error(transparent)]
    Interval(#[from] IntervalError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    /// Rewrite polynomial subexpressions in multivariate Horner form.
    pub horner: bool,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions { horner: true }
    }
}

/// A system together with tapes for `F` and its Jacobian.
#[derive(Clone, Debug)]
pub struct CompiledSystem {
    pub f_slp: SlpProgram,
    pub jac_slp: SlpProgram,
    pub source: ExpressionSystem,
}

impl CompiledSystem {
    pub fn dim(&self) -> usize {
        self.source.dim()
    }

    pub fn has_real_coefficients(&self) -> bool {
        self.source.coefficient_kind == CoefficientKind::Real
    }
}

pub fn compile(sys: &ExpressionSystem) -> CompiledSystem {
    compile_with(sys, CompileOptions::default())
}

pub fn compile_with(sys: &ExpressionSystem, options: CompileOptions) -> CompiledSystem {
    let f_slp = compile_expressions(sys.dim(), &sys.expressions, options);
    let jac_slp = differentiate(&f_slp);
    CompiledSystem { f_slp, jac_slp, source: sys.clone() }
}

/// Compiles a list of expressions over `n` inputs into one tape.
pub fn compile_expressions(n: usize, exprs: &[Expr], options: CompileOptions) -> SlpProgram {
    let mut b = builder::TapeBuilder::new(n);
    let outs: Vec<_> = exprs.iter().map(|e| b.expr(e, options.horner)).collect();
    b.finish(&outs)
}

/// Proves `Re F > 0` on the real box `j` by one interval evaluation at
/// double precision. `false` means "not proven".
pub fn certify_positive_evaluation(c: &CompiledSystem, j: &[RealInterval]) -> bool {
    if !c.has_real_coefficients() || j.len() != c.dim() {
        return false;
    }
    let Ok(input) = IntervalBox::new(j.iter().cloned().map(ComplexInterval::real).collect()) else {
        return false;
    };
    let Ok(out) = eval_interval(&c.f_slp, &input) else {
        return false;
    };
    let u = PrecisionLevel::DOUBLE.unit_roundoff();
    out.iter().all(|v| {
        let tol = (4.0 * u).mul_rnd(&1.0f64.add_rnd(&v.re.mag(), Round::Up), Round::Up);
        *v.re.lo() > 0.0 && v.im.mag() <= tol
    })
}

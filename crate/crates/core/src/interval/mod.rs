//! Real and rectangular complex interval arithmetic with outward rounding.
//!
//! All types are generic over a [`Scalar`] bound type: `f64` for the fast
//! double precision path, [`BigFloat`] for escalated precision. Values are
//! immutable and every operation is a pure function.

mod bigfloat;
mod complex;
mod linalg;
mod precision;
mod real;
mod scalar;

use thiserror::Error;

pub use bigfloat::BigFloat;
pub use complex::{complex_op, mag, Complex, ComplexInterval};
pub use linalg::{mat_vec, op_norm_inf, overlaps, subset_interior, IntervalBox, IntervalMatrix, PointMatrix};
pub use precision::{default_ladder, PrecisionLevel};
pub use real::{real_op, RealInterval};
pub use scalar::{Round, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IntervalError {
    #[error("{op}: divisor interval contains zero")]
    DivisionByZero { op: &'static str },
    #[error("interval bounds must be finite")]
    NonFinite,
    #[error("interval lower bound exceeds upper bound")]
    InvertedBounds,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("interval box must have at least one coordinate")]
    Empty,
}

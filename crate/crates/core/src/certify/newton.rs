use crate::expr::{EvalError, PreparedSlp};
use crate::interval::{Complex, PointMatrix, Round, Scalar};

use super::linalg::solve;
use super::CertifyError;

/// Result of Newton refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome<S: Scalar> {
    pub x: Vec<Complex<S>>,
    /// Updates actually applied.
    pub iterations: usize,
    /// The Jacobian became singular; `x` is the last good iterate.
    pub singular: bool,
}

pub(crate) fn inf_norm<S: Scalar>(v: &[Complex<S>]) -> f64 {
    v.iter().map(|z| z.max_component().to_f64(Round::Up)).fold(0.0, f64::max)
}

pub(crate) fn jacobian_at<S: Scalar>(
    jac: &PreparedSlp<'_, S>,
    x: &[Complex<S>],
) -> Result<PointMatrix<S>, EvalError> {
    let entries = jac.eval_point(x)?;
    Ok(PointMatrix::from_rows(x.len(), entries).expect("jacobian tape has n*n outputs"))
}

/// Newton's method at the precision of the prepared tapes. Stops when the
/// update grows (that update is not applied), when it drops below
/// `4u(1 + ||x||)`, or after `max_iter` steps.
pub(crate) fn newton<S: Scalar>(
    f: &PreparedSlp<'_, S>,
    jac: &PreparedSlp<'_, S>,
    x0: &[Complex<S>],
    max_iter: usize,
) -> Result<NewtonOutcome<S>, EvalError> {
    let u = f.level().unit_roundoff();
    let mut x = x0.to_vec();
    let mut prev = f64::INFINITY;
    let mut iterations = 0;
    for _ in 0..max_iter {
        let fx = f.eval_point(&x)?;
        let j = jacobian_at(jac, &x)?;
        let d = match solve(&j, &fx) {
            Ok(d) => d,
            Err(CertifyError::SingularMatrix) => return Ok(NewtonOutcome { x, iterations, singular: true }),
            Err(e) => unreachable!("dimensions agree: {e}"),
        };
        let step = inf_norm(&d);
        if step > prev {
            break;
        }
        x = x.iter().zip(&d).map(|(a, b)| a.sub(b)).collect();
        iterations += 1;
        if step <= 4.0 * u * (1.0 + inf_norm(&x)) {
            break;
        }
        prev = step;
    }
    Ok(NewtonOutcome { x, iterations, singular: false })
}

use crate::expr::{EvalError, PreparedSlp};
use crate::interval::{
    mat_vec, op_norm_inf, subset_interior, Complex, ComplexInterval, IntervalBox, IntervalMatrix, PointMatrix,
    PrecisionLevel, RealInterval, Round, Scalar,
};

use super::CertifyError;

/// Upper bound on `|z|` for a point.
fn abs_up<S: Scalar>(z: &Complex<S>) -> S {
    ComplexInterval::point(z).mag()
}

/// The box `x_j ± r_j` in both real and imaginary parts, with
/// `r_j = max(residual_j · u^(-1/4), 4u(1 + |x_j|))`.
pub fn inflate<S: Scalar>(x: &[Complex<S>], residual: &[S], level: PrecisionLevel) -> IntervalBox<S> {
    let factor = S::from_f64(level.inflation_factor(), level);
    let floor = S::from_f64(4.0 * level.unit_roundoff(), level);
    let one = S::one(level);
    let entries = x
        .iter()
        .zip(residual)
        .map(|(z, res)| {
            let scaled = res.mul_rnd(&factor, Round::Up);
            let min = floor.mul_rnd(&one.add_rnd(&abs_up(z), Round::Up), Round::Up);
            let r = scaled.max_of(&min);
            let around = |c: &S| {
                RealInterval::new(c.sub_rnd(&r, Round::Down), c.add_rnd(&r, Round::Up)).expect("finite radius")
            };
            ComplexInterval::new(around(&z.re), around(&z.im))
        })
        .collect();
    IntervalBox::new(entries).expect("candidate has at least one coordinate")
}

/// Componentwise magnitude of `Y·□F(x)`, the residual estimate used for
/// inflation.
pub(crate) fn newton_residual<S: Scalar>(
    f: &PreparedSlp<'_, S>,
    x: &[Complex<S>],
    y: &PointMatrix<S>,
) -> Result<Vec<S>, EvalError> {
    let fx = IntervalBox::new(f.eval_interval(&IntervalBox::point(x))?)?;
    Ok(mat_vec(&y.to_interval(), &fx)?.iter().map(ComplexInterval::mag).collect())
}

/// Everything computed by one Krawczyk test.
#[derive(Clone, Debug)]
pub struct KrawczykEvaluation<S: Scalar> {
    pub image: IntervalBox<S>,
    /// `1 - Y·□JF(I)`.
    pub contraction_matrix: IntervalMatrix<S>,
    /// Upper bound on `√2·‖1 - Y·□JF(I)‖∞`.
    pub contraction_norm: f64,
}

impl<S: Scalar> KrawczykEvaluation<S> {
    /// `K ⊂ int I` and `√2·‖1 - Y·□JF(I)‖∞ < 1`.
    pub fn certifies(&self, i: &IntervalBox<S>) -> bool {
        self.contraction_norm < 1.0 && subset_interior(&self.image, i)
    }
}

/// `K = x - Y·□F(x) + (1 - Y·□JF(I))·(I - x)`, evaluated left to right.
pub(crate) fn evaluate<S: Scalar>(
    f: &PreparedSlp<'_, S>,
    jac: &PreparedSlp<'_, S>,
    i: &IntervalBox<S>,
    x: &[Complex<S>],
    y: &PointMatrix<S>,
) -> Result<KrawczykEvaluation<S>, CertifyError> {
    let n = x.len();
    if i.len() != n || y.dim() != n || f.program().n_inputs() != n {
        return Err(CertifyError::Dimension { expected: n, found: i.len() });
    }
    let xbox = IntervalBox::point(x);
    let yi = y.to_interval();
    let fx = IntervalBox::new(f.eval_interval(&xbox)?).map_err(EvalError::from)?;
    let ji = IntervalMatrix::from_rows(n, jac.eval_interval(i)?).map_err(EvalError::from)?;
    let m = yi.mul(&ji).map_err(EvalError::from)?.identity_minus();
    let correction = mat_vec(&m, &i.sub(&xbox)).map_err(EvalError::from)?;
    let image = xbox.sub(&mat_vec(&yi, &fx).map_err(EvalError::from)?).add(&correction);

    let level = x[0].level();
    let sqrt2 = S::from_f64(2.0, level).sqrt_rnd(Round::Up);
    let contraction_norm = sqrt2.mul_rnd(&op_norm_inf(&m), Round::Up).to_f64(Round::Up);
    Ok(KrawczykEvaluation { image, contraction_matrix: m, contraction_norm })
}

/// `K_{x,Y}(I)` for a compiled system at the precision of `x`.
pub fn krawczyk_operator<S: Scalar>(
    c: &crate::expr::CompiledSystem,
    i: &IntervalBox<S>,
    x: &[Complex<S>],
    y: &PointMatrix<S>,
) -> Result<IntervalBox<S>, CertifyError> {
    Ok(krawczyk_test(c, i, x, y)?.image)
}

/// Runs the full Krawczyk test on a given box.
pub fn krawczyk_test<S: Scalar>(
    c: &crate::expr::CompiledSystem,
    i: &IntervalBox<S>,
    x: &[Complex<S>],
    y: &PointMatrix<S>,
) -> Result<KrawczykEvaluation<S>, CertifyError> {
    let level = x.first().map(Complex::level).unwrap_or(PrecisionLevel::DOUBLE);
    let f = c.f_slp.prepare::<S>(level);
    let jac = c.jac_slp.prepare::<S>(level);
    evaluate(&f, &jac, i, x, y)
}

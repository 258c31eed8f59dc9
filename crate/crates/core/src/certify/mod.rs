//! Krawczyk certification of approximate zeros.
//!
//! For each candidate and each precision level in turn: refine with Newton,
//! take `Y ≈ JF(x̃)^-1`, inflate `x̃` to a box `I` and accept `I` when
//! `K_{x̃,Y}(I)` lies strictly inside `I` and `√2·‖1 - Y·□JF(I)‖∞ < 1`.
//! Such a box contains exactly one zero of the system.

mod krawczyk;
mod linalg;
mod newton;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{CompiledSystem, EvalError, PreparedSlp};
use crate::interval::{BigFloat, Complex, IntervalBox, IntervalError, PointMatrix, PrecisionLevel, Scalar};

pub use krawczyk::{inflate, krawczyk_operator, krawczyk_test, KrawczykEvaluation};
pub use linalg::{approximate_inverse, solve};
pub use newton::NewtonOutcome;

pub const DEFAULT_NEWTON_ITERATIONS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertifyError {
    #[error("singular matrix")]
    SingularMatrix,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Eval(#[from] EvalError),
}

impl From<IntervalError> for CertifyError {
    fn from(e: IntervalError) -> Self {
        CertifyError::Eval(EvalError::Interval(e))
    }
}

/// An approximate zero to be certified, in double precision.
#[derive(Clone, Debug, PartialEq)]
pub struct Candidate {
    pub index: usize,
    pub x: Vec<Complex>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Certified,
    NotCertified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Reality {
    Real,
    NotReal,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    Yes,
    No,
    NotApplicable,
}

pub const REASON_SINGULAR: &str = "singular Jacobian";
pub const REASON_CONTRACTION: &str = "contraction test failed";
pub const REASON_ENCLOSURE: &str = "enclosure failure";

/// Outcome for one candidate. Bounds are stored exactly as computed, in
/// [`BigFloat`] form whatever backend produced them.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateResult {
    pub index: usize,
    pub status: Status,
    pub reason: Option<String>,
    /// Level of the last attempt (the successful one when certified).
    pub precision_used: PrecisionLevel,
    /// The box `I`; for failures, the box of the last attempt if one was built.
    pub interval_box: Option<IntervalBox<BigFloat>>,
    pub krawczyk_image: Option<IntervalBox<BigFloat>>,
    pub refined_point: Option<Vec<Complex<BigFloat>>>,
    pub conditioner: Option<PointMatrix<BigFloat>>,
    /// Upper bound on `√2·‖1 - Y·□JF(I)‖∞`.
    pub contraction_norm: Option<f64>,
    pub reality: Reality,
    pub positive: Positivity,
}

impl CertificateResult {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }

    /// The certified box widened outward to double precision.
    pub fn box_f64(&self) -> Option<IntervalBox> {
        self.interval_box.as_ref().map(|b| b.convert::<f64>(PrecisionLevel::DOUBLE))
    }
}

/// Evidence from one attempt at a single level.
struct Attempt<S: Scalar> {
    refined: Vec<Complex<S>>,
    conditioner: Option<PointMatrix<S>>,
    interval_box: Option<IntervalBox<S>>,
    evaluation: Option<KrawczykEvaluation<S>>,
    failure: Option<&'static str>,
}

fn reason_for(e: &CertifyError) -> &'static str {
    match e {
        CertifyError::SingularMatrix => REASON_SINGULAR,
        _ => REASON_ENCLOSURE,
    }
}

fn attempt_at<S: Scalar>(c: &CompiledSystem, cand: &Candidate, level: PrecisionLevel) -> Attempt<S> {
    let f = c.f_slp.prepare::<S>(level);
    let jac = c.jac_slp.prepare::<S>(level);
    let x0: Vec<Complex<S>> = cand.x.iter().map(|z| Complex::from_f64(z.re, z.im, level)).collect();
    let mut out = Attempt { refined: x0.clone(), conditioner: None, interval_box: None, evaluation: None, failure: None };

    let refined = match newton::newton(&f, &jac, &x0, DEFAULT_NEWTON_ITERATIONS) {
        Ok(r) => r.x,
        Err(_) => {
            out.failure = Some(REASON_ENCLOSURE);
            return out;
        }
    };
    out.refined = refined.clone();
    let y = match newton::jacobian_at(&jac, &refined).map_err(CertifyError::from).and_then(|j| approximate_inverse(&j)) {
        Ok(y) => y,
        Err(e) => {
            out.failure = Some(reason_for(&e));
            return out;
        }
    };
    out.conditioner = Some(y.clone());
    let residual = match krawczyk::newton_residual(&f, &refined, &y) {
        Ok(r) => r,
        Err(_) => {
            out.failure = Some(REASON_ENCLOSURE);
            return out;
        }
    };
    let i = inflate(&refined, &residual, level);
    out.interval_box = Some(i.clone());
    match krawczyk::evaluate(&f, &jac, &i, &refined, &y) {
        Ok(ev) => {
            if !ev.certifies(&i) {
                out.failure = Some(REASON_CONTRACTION);
            }
            out.evaluation = Some(ev);
        }
        Err(e) => out.failure = Some(reason_for(&e)),
    }
    out
}

fn lift<S: Scalar>(index: usize, level: PrecisionLevel, a: Attempt<S>) -> CertificateResult {
    CertificateResult {
        index,
        status: if a.failure.is_none() { Status::Certified } else { Status::NotCertified },
        reason: a.failure.map(str::to_string),
        precision_used: level,
        interval_box: a.interval_box.map(|b| b.convert(level)),
        krawczyk_image: a.evaluation.as_ref().map(|e| e.image.convert(level)),
        refined_point: Some(a.refined.iter().map(|z| z.convert(level)).collect()),
        conditioner: a.conditioner.map(|y| y.convert(level)),
        contraction_norm: a.evaluation.map(|e| e.contraction_norm),
        reality: Reality::Unknown,
        positive: Positivity::NotApplicable,
    }
}

/// Certifies one candidate, escalating through `ladder` until a level
/// succeeds. Every level refines the original candidate.
pub fn certify_candidate(c: &CompiledSystem, cand: &Candidate, ladder: &[PrecisionLevel]) -> CertificateResult {
    let n = c.dim();
    let mut last = None;
    for &level in ladder {
        let res = if cand.x.len() != n {
            CertificateResult {
                index: cand.index,
                status: Status::NotCertified,
                reason: Some(format!("candidate has {} coordinates, system has {n}", cand.x.len())),
                precision_used: level,
                interval_box: None,
                krawczyk_image: None,
                refined_point: None,
                conditioner: None,
                contraction_norm: None,
                reality: Reality::Unknown,
                positive: Positivity::NotApplicable,
            }
        } else if level.is_double() {
            lift(cand.index, level, attempt_at::<f64>(c, cand, level))
        } else {
            lift(cand.index, level, attempt_at::<BigFloat>(c, cand, level))
        };
        if res.is_certified() {
            return check_reality(c, res);
        }
        last = Some(res);
    }
    last.expect("ladder is not empty")
}

/// Classifies the associated zero of a certified box.
///
/// Real: the system has real coefficients and `conj(K) ⊆ I`. Not real: some
/// coordinate of `I` has an imaginary part excluding 0. Otherwise unknown.
/// A real zero is positive when every `Re(I_k)` lies above 0.
pub fn check_reality(c: &CompiledSystem, mut res: CertificateResult) -> CertificateResult {
    res.reality = Reality::Unknown;
    res.positive = Positivity::NotApplicable;
    let (Status::Certified, Some(i), Some(k)) = (res.status, &res.interval_box, &res.krawczyk_image) else {
        return res;
    };
    let conj_inside = i.iter().zip(k.iter()).all(|(ij, kj)| kj.conj().is_subset_of(ij));
    if c.has_real_coefficients() && conj_inside {
        res.reality = Reality::Real;
        let positive = i.iter().all(|ij| !ij.re.lo().is_negative() && !ij.re.lo().is_zero());
        res.positive = if positive { Positivity::Yes } else { Positivity::No };
    } else if i.iter().any(|ij| !ij.im.contains_zero()) {
        res.reality = Reality::NotReal;
    }
    res
}

/// Result of iterating `x ← x - Y·F(x)` inside a certified box.
#[derive(Clone, Debug, PartialEq)]
pub struct RefineOutcome {
    pub x: Vec<Complex<BigFloat>>,
    pub steps: usize,
    /// An iterate left the box (possible only through rounding); `x` is the
    /// last iterate inside.
    pub escaped: bool,
}

fn refine_at<S: Scalar>(
    c: &CompiledSystem,
    i: &IntervalBox<BigFloat>,
    y: &PointMatrix<BigFloat>,
    x0: &[Complex],
    k: usize,
    level: PrecisionLevel,
) -> Result<RefineOutcome, EvalError> {
    let f: PreparedSlp<'_, S> = c.f_slp.prepare(level);
    let y: PointMatrix<S> = y.convert(level);
    let mut x: Vec<Complex<S>> = x0.iter().map(|z| Complex::from_f64(z.re, z.im, level)).collect();
    let lift = |x: &[Complex<S>]| x.iter().map(|z| z.convert::<BigFloat>(level)).collect::<Vec<_>>();
    for step in 0..k {
        let fx = f.eval_point(&x)?;
        let yfx = y.mul_vec(&fx);
        let next: Vec<Complex<S>> = x.iter().zip(&yfx).map(|(a, b)| a.sub(b)).collect();
        let lifted = lift(&next);
        if !i.contains(&lifted) {
            return Ok(RefineOutcome { x: lift(&x), steps: step, escaped: true });
        }
        x = next;
    }
    Ok(RefineOutcome { x: lift(&x), steps: k, escaped: false })
}

/// Runs `k` steps of `x_i = x_{i-1} - Y·F(x_{i-1})` with the certificate's
/// conditioner. These iterates converge to the associated zero at least
/// linearly with rate `contraction_norm`.
pub fn refine_in_box(
    c: &CompiledSystem,
    res: &CertificateResult,
    x0: &[Complex],
    k: usize,
) -> Result<RefineOutcome, CertifyError> {
    let (Some(i), Some(y)) = (&res.interval_box, &res.conditioner) else {
        return Err(CertifyError::Dimension { expected: c.dim(), found: 0 });
    };
    if x0.len() != c.dim() {
        return Err(CertifyError::Dimension { expected: c.dim(), found: x0.len() });
    }
    let level = res.precision_used;
    Ok(if level.is_double() {
        refine_at::<f64>(c, i, y, x0, k, level)?
    } else {
        refine_at::<BigFloat>(c, i, y, x0, k, level)?
    })
}

/// Newton refinement in double precision.
pub fn newton_refine(c: &CompiledSystem, x: &[Complex], max_iter: usize) -> Result<NewtonOutcome<f64>, CertifyError> {
    if x.len() != c.dim() {
        return Err(CertifyError::Dimension { expected: c.dim(), found: x.len() });
    }
    let level = PrecisionLevel::DOUBLE;
    Ok(newton::newton(&c.f_slp.prepare(level), &c.jac_slp.prepare(level), x, max_iter)?)
}

#[cfg(test)]
mod tests;

#![allow(clippy::approx_constant)]

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::expr::{compile, parse_system};
use crate::interval::{default_ladder, ComplexInterval, RealInterval, Round};

fn system(text: &str) -> CompiledSystem {
    compile(&parse_system(text).unwrap())
}

fn cand(index: usize, x: &[(f64, f64)]) -> Candidate {
    Candidate { index, x: x.iter().map(|&(re, im)| Complex::new(re, im)).collect() }
}

fn ladder() -> Vec<PrecisionLevel> {
    default_ladder(512)
}

fn rat(x: f64) -> BigRational {
    BigFloat::from_f64(x, 53).to_rational()
}

fn big_rat(x: &BigFloat) -> BigRational {
    x.to_rational()
}

/// Exact test of `s·√a ∈ [lo, hi]` for rational `a > 0` and sign `s`.
fn contains_signed_sqrt(i: &RealInterval<BigFloat>, positive: bool, a: &BigRational) -> bool {
    let (lo, hi) = (big_rat(i.lo()), big_rat(i.hi()));
    let zero = BigRational::from_integer(0.into());
    if positive {
        (lo <= zero || &lo * &lo <= *a) && hi >= zero && &hi * &hi >= *a
    } else {
        lo <= zero && &lo * &lo >= *a && (hi >= zero || &hi * &hi <= *a)
    }
}

fn point_matrix(v: f64) -> PointMatrix {
    PointMatrix::from_rows(1, vec![Complex::new(v, 0.0)]).unwrap()
}

#[test]
fn approximate_inverse_examples() {
    let id = PointMatrix::<f64>::identity(3, PrecisionLevel::DOUBLE);
    assert_eq!(approximate_inverse(&id).unwrap(), id);
    assert_eq!(approximate_inverse(&point_matrix(2.0)).unwrap(), point_matrix(0.5));
    let c = |re| Complex::new(re, 0.0);
    let singular = PointMatrix::from_rows(2, vec![c(1.0), c(2.0), c(1.0), c(2.0)]).unwrap();
    assert_eq!(approximate_inverse(&singular), Err(CertifyError::SingularMatrix));
}

#[test]
fn approximate_inverse_of_random_complex_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for n in 1..6 {
        let data = (0..n * n).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let m = PointMatrix::from_rows(n, data).unwrap();
        let y = approximate_inverse(&m).unwrap();
        let p = y.mul(&m);
        for i in 0..n {
            for j in 0..n {
                let (re, im) = p.get(i, j).to_f64();
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((re - target).abs() < 1e-10 && im.abs() < 1e-10);
            }
        }
    }
}

#[test]
fn newton_examples() {
    let c = system("variables: x\nx^2 - 2");
    let x0 = [Complex::new(1.5, 0.0)];
    let one = newton_refine(&c, &x0, 1).unwrap();
    assert_eq!(one.x[0].re, 1.5 - 0.25 / 3.0);
    let two = newton_refine(&c, &x0, 2).unwrap();
    assert!((two.x[0].re - 1.4142156862745099).abs() < 1e-15);

    let c = system("variables: x\nx^2 - 1");
    let fixed = newton_refine(&c, &[Complex::new(1.0, 0.0)], 8).unwrap();
    assert_eq!(fixed.x[0].to_f64(), (1.0, 0.0));
    assert_eq!(fixed.iterations, 1);
    let near = newton_refine(&c, &[Complex::new(1.0 + 1e-6, 0.0)], 3).unwrap();
    assert!((near.x[0].re - 1.0).abs() < 1e-12);

    let c = system("variables: x\nx^2");
    let stuck = newton_refine(&c, &[Complex::new(0.0, 0.0)], 8).unwrap();
    assert!(stuck.singular);
    assert_eq!(stuck.iterations, 0);
}

#[test]
fn inflation_radius() {
    let level = PrecisionLevel::DOUBLE;
    let radius = |b: &IntervalBox| b[0].re.hi() - b[0].re.lo();
    let b = inflate(&[Complex::new(0.0, 0.0)], &[1e-15], level);
    let expected = 1e-15 * 2f64.powf(13.25);
    assert!((radius(&b) / 2.0 - expected).abs() < 1e-20);
    assert!((expected - 9.74e-12).abs() < 1e-14);

    let u = level.unit_roundoff();
    let b = inflate(&[Complex::new(1.0, 0.0)], &[0.0], level);
    assert_eq!(*b[0].re.hi(), 1.0 + 8.0 * u);
    assert_eq!(*b[0].im.lo(), -8.0 * u);
    let b = inflate(&[Complex::new(0.0, 0.0)], &[0.0], level);
    assert_eq!(b[0], ComplexInterval::new(RealInterval::new(-4.0 * u, 4.0 * u).unwrap(), RealInterval::new(-4.0 * u, 4.0 * u).unwrap()));
}

#[test]
fn krawczyk_operator_examples() {
    let c = system("variables: x\nx^2 - 1");
    let ri = |a, b| RealInterval::new(a, b).unwrap();
    let i = IntervalBox::new(vec![ComplexInterval::new(ri(0.9, 1.1), ri(-0.1, 0.1))]).unwrap();
    let x = [Complex::new(1.0, 0.0)];
    let k = krawczyk_operator(&c, &i, &x, &point_matrix(0.5)).unwrap();
    let expected = ComplexInterval::new(ri(0.98, 1.02), ri(-0.02, 0.02));
    assert!(expected.is_subset_of(&k[0]));
    assert!(k[0].re.width() < 0.04 + 1e-15 && k[0].im.width() < 0.04 + 1e-15);

    let at_zero = IntervalBox::point(&x);
    assert_eq!(krawczyk_operator(&c, &at_zero, &x, &point_matrix(0.5)).unwrap(), at_zero);

    let k = krawczyk_operator(&c, &i, &x, &point_matrix(0.0)).unwrap();
    assert!(i.is_subset_of(&k));
    assert!(k[0].re.width() < 0.2 + 1e-15);
}

#[test]
fn certifies_simple_root() {
    let c = system("variables: x\nx^2 - 1");
    let res = certify_candidate(&c, &cand(0, &[(1.0000003, 0.0)]), &ladder());
    assert_eq!(res.status, Status::Certified);
    assert_eq!(res.precision_used, PrecisionLevel::DOUBLE);
    let i = res.interval_box.as_ref().unwrap();
    let one = BigRational::from_integer(1.into());
    assert!(big_rat(i[0].re.lo()) < one && one < big_rat(i[0].re.hi()));
    assert!(res.contraction_norm.unwrap() < 1.0);
    assert!(crate::interval::subset_interior(res.krawczyk_image.as_ref().unwrap(), i));
    assert_eq!(res.reality, Reality::Real);
    assert_eq!(res.positive, Positivity::Yes);
}

#[test]
fn double_root_is_singular() {
    let c = system("variables: x\nx^2");
    let res = certify_candidate(&c, &cand(4, &[(0.0, 0.0)]), &ladder());
    assert_eq!(res.status, Status::NotCertified);
    assert_eq!(res.reason.as_deref(), Some(REASON_SINGULAR));
    assert_eq!(res.index, 4);
    assert_eq!(res.reality, Reality::Unknown);
    assert_eq!(res.positive, Positivity::NotApplicable);
}

#[test]
fn wrong_length_candidate_is_rejected() {
    let c = system("variables: x, y\nx - 1\ny - 1");
    let res = certify_candidate(&c, &cand(0, &[(1.0, 0.0)]), &ladder());
    assert_eq!(res.status, Status::NotCertified);
    assert!(res.reason.unwrap().contains("coordinates"));
}

#[test]
fn reality_classification() {
    let c = system("variables: x\nx^2 - 2");
    let pos = certify_candidate(&c, &cand(0, &[(1.41421356, 0.0)]), &ladder());
    assert_eq!((pos.reality, pos.positive), (Reality::Real, Positivity::Yes));
    let neg = certify_candidate(&c, &cand(1, &[(-1.41421356, 0.0)]), &ladder());
    assert_eq!((neg.reality, neg.positive), (Reality::Real, Positivity::No));

    let c = system("variables: x\nx^2 + 1");
    let res = certify_candidate(&c, &cand(0, &[(0.0, 1.0)]), &ladder());
    assert_eq!(res.status, Status::Certified);
    assert_eq!((res.reality, res.positive), (Reality::NotReal, Positivity::NotApplicable));
    assert!(!res.interval_box.unwrap()[0].im.contains_zero());

    let c = system("variables: x\ni*x - i");
    let res = certify_candidate(&c, &cand(0, &[(1.0, 0.0)]), &ladder());
    assert_eq!(res.status, Status::Certified);
    assert_eq!((res.reality, res.positive), (Reality::Unknown, Positivity::NotApplicable));
}

#[test]
fn reality_is_never_claimed_for_nonreal_zeros() {
    let c = system("variables: x\nx^2 - 2*i");
    for z in [(1.0, 1.0), (-1.0, -1.0)] {
        let res = certify_candidate(&c, &cand(0, &[z]), &ladder());
        assert_eq!(res.status, Status::Certified);
        assert_eq!(res.reality, Reality::NotReal);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let b: f64 = rng.gen_range(-3.0..3.0);
        let c0: f64 = b * b / 4.0 + rng.gen_range(0.1..3.0);
        let sys = system(&format!("variables: x\nx^2 + {b:e}*x + {c0:e}"));
        let disc = (c0 - b * b / 4.0).sqrt();
        for s in [1.0, -1.0] {
            let res = certify_candidate(&sys, &cand(0, &[(-b / 2.0, s * disc)]), &ladder());
            assert_eq!(res.status, Status::Certified);
            assert_ne!(res.reality, Reality::Real);
        }
    }
}

#[test]
fn refine_in_box_examples() {
    let c = system("variables: x\nx^2 - 1");
    let ri = |a, b| RealInterval::new(a, b).unwrap();
    let i = IntervalBox::new(vec![ComplexInterval::new(ri(0.9, 1.1), ri(-0.1, 0.1))]).unwrap();
    let level = PrecisionLevel::DOUBLE;
    let res = CertificateResult {
        index: 0,
        status: Status::Certified,
        reason: None,
        precision_used: level,
        interval_box: Some(i.convert(level)),
        krawczyk_image: None,
        refined_point: None,
        conditioner: Some(point_matrix(0.5).convert(level)),
        contraction_norm: None,
        reality: Reality::Unknown,
        positive: Positivity::NotApplicable,
    };
    let x0 = [Complex::new(0.9, 0.0)];
    let one = refine_in_box(&c, &res, &x0, 1).unwrap();
    assert!((one.x[0].to_f64().0 - 0.995).abs() < 1e-15);
    let two = refine_in_box(&c, &res, &x0, 2).unwrap();
    assert!((two.x[0].to_f64().0 - 0.9999875).abs() < 1e-15);
    assert!(!two.escaped);
    let zero = refine_in_box(&c, &res, &x0, 0).unwrap();
    assert_eq!(zero.x[0].to_f64(), (0.9, 0.0));
    let fixed = refine_in_box(&c, &res, &[Complex::new(1.0, 0.0)], 5).unwrap();
    assert_eq!(fixed.x[0].to_f64(), (1.0, 0.0));
}

#[test]
fn refine_in_box_converges_at_the_contraction_rate() {
    let c = system("variables: x, y\nx^2 + y^2 - 5\nx*y - 2");
    let res = certify_candidate(&c, &cand(0, &[(1.0 + 1e-9, 0.0), (2.0 - 1e-9, 0.0)]), &ladder());
    assert!(res.is_certified(), "{:?} {:?} {:?}", res.reason, res.contraction_norm, res.interval_box);
    let i = res.box_f64().unwrap();
    let x0: Vec<Complex> = i.iter().map(|ci| Complex::new(*ci.re.lo(), *ci.im.hi())).collect();
    let norm = |x: &[Complex]| {
        let fx = crate::expr::eval_point(&c.f_slp, x).unwrap();
        fx.iter().map(|z| z.to_f64().0.abs().max(z.to_f64().1.abs())).fold(0.0, f64::max)
    };
    let r0 = norm(&x0);
    let rate = res.contraction_norm.unwrap();
    for k in 1..4 {
        let out = refine_in_box(&c, &res, &x0, k).unwrap();
        assert!(!out.escaped);
        let xk: Vec<Complex> = out.x.iter().map(|z| { let (a, b) = z.to_f64(); Complex::new(a, b) }).collect();
        assert!(norm(&xk) <= rate.powi(k as i32) * r0 * 4.0 + 1e-15);
    }
}

#[test]
fn product_systems_certify_every_root() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for n in 1..=5usize {
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(1.0..4.0)).collect();
        let names: Vec<String> = (0..n).map(|k| format!("x{k}")).collect();
        let eqs: Vec<String> = names.iter().zip(&a).map(|(v, ai)| format!("{v}^2 - {ai:e}")).collect();
        let c = system(&format!("variables: {}\n{}", names.join(", "), eqs.join("\n")));
        let exact_a: Vec<BigRational> = a.iter().map(|&x| rat(x)).collect();
        let mut boxes = Vec::new();
        for signs in 0..(1u32 << n) {
            let x: Vec<(f64, f64)> = (0..n)
                .map(|k| {
                    let s = if signs >> k & 1 == 1 { -1.0 } else { 1.0 };
                    (s * a[k].sqrt() * (1.0 + 1e-8), 0.0)
                })
                .collect();
            let res = certify_candidate(&c, &cand(signs as usize, &x), &ladder());
            assert!(res.is_certified(), "n={n} signs={signs}: {:?}", res.reason);
            let i = res.interval_box.clone().unwrap();
            for k in 0..n {
                assert!(contains_signed_sqrt(&i[k].re, signs >> k & 1 == 0, &exact_a[k]));
                assert!(i[k].im.contains_zero());
            }
            // No other root of the system lies in this box.
            for other in (0..(1u32 << n)).filter(|&o| o != signs) {
                let inside = (0..n).all(|k| contains_signed_sqrt(&i[k].re, other >> k & 1 == 0, &exact_a[k]));
                assert!(!inside);
            }
            assert_eq!(res.reality, Reality::Real);
            assert_eq!(res.positive == Positivity::Yes, signs == 0);
            boxes.push(i);
        }
    }
}

#[test]
fn contraction_fails_for_boxes_too_large_or_too_small() {
    let c = system("variables: x\nx^2 - 1");
    let ri = |a, b| RealInterval::new(a, b).unwrap();
    let x = [Complex::new(1.0, 0.0)];
    let y = point_matrix(0.5);
    let r = 5e-7;
    let good = IntervalBox::new(vec![ComplexInterval::new(ri(1.0 - r, 1.0 + r), ri(-r, r))]).unwrap();
    let ev = krawczyk_test(&c, &good, &x, &y).unwrap();
    assert!(ev.certifies(&good));
    let r = r * 1e6;
    let wide = IntervalBox::new(vec![ComplexInterval::new(ri(1.0 - r, 1.0 + r), ri(-r, r))]).unwrap();
    let ev = krawczyk_test(&c, &wide, &x, &y).unwrap();
    assert!(!ev.certifies(&wide));
    assert!(ev.contraction_norm >= 1.0);

    let c = system("variables: x\nx^2 - 2");
    let res = certify_candidate(&c, &cand(0, &[(1.4142, 0.0)]), &ladder());
    let xt: Vec<Complex> = res.refined_point.unwrap().iter().map(|z| { let (a, b) = z.to_f64(); Complex::new(a, b) }).collect();
    let y: PointMatrix = res.conditioner.unwrap().convert(PrecisionLevel::DOUBLE);
    let point = IntervalBox::point(&xt);
    let ev = krawczyk_test(&c, &point, &xt, &y).unwrap();
    assert!(!ev.certifies(&point));
}

#[test]
fn certification_is_deterministic() {
    let c = system("variables: x, y\nx^2 + y^2 - 5\nx*y - 2");
    let candidate = cand(3, &[(1.0000001, 0.0), (1.9999999, 0.0)]);
    let a = certify_candidate(&c, &candidate, &ladder());
    let b = certify_candidate(&c, &candidate, &ladder());
    assert_eq!(a, b);
}

#[test]
fn escalates_when_double_precision_is_insufficient() {
    // Roots 1 ± 1e-10 of (x - 1)^2 - 1e-20.
    let c = system("variables: x\nx^2 - 2*x + 1 - 1e-20");
    let levels: Vec<PrecisionLevel> = [1.0 + 1e-10, 1.0 - 1e-10]
        .iter()
        .map(|&r| {
            let res = certify_candidate(&c, &cand(0, &[(r, 0.0)]), &ladder());
            assert!(res.is_certified(), "{:?}", res.reason);
            res.precision_used
        })
        .collect();
    assert!(levels.iter().any(|l| !l.is_double()));
    assert!(levels.iter().all(|l| l.significand_bits() <= 256));
}

#[test]
fn bacillus_steady_state_is_certified_in_double_precision() {
    let text = include_str!("../../tests/data/bacillus.sys");
    let c = system(text);
    let x = [
        0.10633375735, 0.303554095, 2.25701026, 0.0557971948, 8.288216246, 27.0899869, 0.240800757, 10.42034597,
        1.99593338916, 0.00406661084,
    ];
    let candidate = cand(0, &x.iter().map(|&v| (v, 0.0)).collect::<Vec<_>>());
    let res = certify_candidate(&c, &candidate, &[PrecisionLevel::DOUBLE]);
    assert!(res.is_certified(), "{:?} norm {:?}", res.reason, res.contraction_norm);
    assert_eq!((res.reality, res.positive), (Reality::Real, Positivity::Yes));
    let b = res.box_f64().unwrap();
    for (k, v) in x.iter().enumerate() {
        let mid = b[k].re.midpoint();
        assert!(((mid - v) / v).abs() <= 1e-7);
        assert!(b[k].re.width().to_f64(Round::Up) / 2.0 <= 1e-6);
    }
}

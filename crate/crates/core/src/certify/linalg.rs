use crate::interval::{Complex, PointMatrix, Scalar};

use super::CertifyError;

/// LU factorisation with partial pivoting, row-major.
struct Lu<S> {
    n: usize,
    lu: Vec<Complex<S>>,
    perm: Vec<usize>,
}

fn pivot_size<S: Scalar>(z: &Complex<S>) -> S {
    z.max_component()
}

impl<S: Scalar> Lu<S> {
    fn factor(m: &PointMatrix<S>) -> Result<Self, CertifyError> {
        let n = m.dim();
        let mut lu = m.entries().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&a, &b| {
                    pivot_size(&lu[a * n + k])
                        .partial_cmp(&pivot_size(&lu[b * n + k]))
                        .unwrap_or(std::cmp::Ordering::Equal)
                        .then(b.cmp(&a))
                })
                .expect("nonempty range");
            if lu[p * n + k].is_zero() {
                return Err(CertifyError::SingularMatrix);
            }
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k].clone();
            for i in k + 1..n {
                let f = lu[i * n + k].div(&pivot).ok_or(CertifyError::SingularMatrix)?;
                for j in k + 1..n {
                    lu[i * n + j] = lu[i * n + j].sub(&f.mul(&lu[k * n + j]));
                }
                lu[i * n + k] = f;
            }
        }
        Ok(Lu { n, lu, perm })
    }

    fn solve(&self, b: &[Complex<S>]) -> Result<Vec<Complex<S>>, CertifyError> {
        let n = self.n;
        let mut y: Vec<Complex<S>> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            for j in 0..i {
                y[i] = y[i].sub(&self.lu[i * n + j].mul(&y[j]));
            }
        }
        for i in (0..n).rev() {
            for j in i + 1..n {
                y[i] = y[i].sub(&self.lu[i * n + j].mul(&y[j]));
            }
            y[i] = y[i].div(&self.lu[i * n + i]).ok_or(CertifyError::SingularMatrix)?;
        }
        Ok(y)
    }
}

/// Solves `m·x = b` in floating point at the precision of `m`.
pub fn solve<S: Scalar>(m: &PointMatrix<S>, b: &[Complex<S>]) -> Result<Vec<Complex<S>>, CertifyError> {
    if b.len() != m.dim() {
        return Err(CertifyError::Dimension { expected: m.dim(), found: b.len() });
    }
    Lu::factor(m)?.solve(b)
}

/// Floating point inverse of `m`. Only accuracy, not correctness, depends on
/// this: the interval test decides soundness.
pub fn approximate_inverse<S: Scalar>(m: &PointMatrix<S>) -> Result<PointMatrix<S>, CertifyError> {
    let n = m.dim();
    let lu = Lu::factor(m)?;
    let level = m.get(0, 0).level();
    let mut data = vec![Complex::zero(level); n * n];
    for k in 0..n {
        let mut e = vec![Complex::zero(level); n];
        e[k] = Complex::one(level);
        let col = lu.solve(&e)?;
        for (i, v) in col.into_iter().enumerate() {
            data[i * n + k] = v;
        }
    }
    Ok(PointMatrix::from_rows(n, data).expect("square"))
}

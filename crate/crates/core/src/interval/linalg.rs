use std::fmt;
use std::ops::Index;

use super::complex::{Complex, ComplexInterval};
use super::scalar::{Round, Scalar};
use super::{IntervalError, PrecisionLevel};

/// An element of `IC^n`.
#[derive(Clone, PartialEq)]
pub struct IntervalBox<S = f64>(Vec<ComplexInterval<S>>);

impl<S: Scalar> IntervalBox<S> {
    pub fn new(entries: Vec<ComplexInterval<S>>) -> Result<Self, IntervalError> {
        if entries.is_empty() {
            return Err(IntervalError::Empty);
        }
        Ok(IntervalBox(entries))
    }

    /// The degenerate box `[Re x, Re x] + i[Im x, Im x]` per coordinate.
    pub fn point(x: &[Complex<S>]) -> Self {
        IntervalBox(x.iter().map(ComplexInterval::point).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[ComplexInterval<S>] {
        &self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, ComplexInterval<S>> {
        self.0.iter()
    }

    pub fn into_inner(self) -> Vec<ComplexInterval<S>> {
        self.0
    }

    pub fn contains(&self, x: &[Complex<S>]) -> bool {
        self.len() == x.len() && self.0.iter().zip(x).all(|(i, z)| i.contains(z))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a.is_subset_of(b))
    }

    pub fn add(&self, other: &Self) -> Self {
        IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        IntervalBox(self.0.iter().zip(&other.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn midpoint(&self) -> Vec<Complex<S>> {
        self.0.iter().map(ComplexInterval::midpoint).collect()
    }

    pub fn convert<T: Scalar>(&self, level: PrecisionLevel) -> IntervalBox<T> {
        IntervalBox(self.0.iter().map(|c| c.convert(level)).collect())
    }
}

impl<S> Index<usize> for IntervalBox<S> {
    type Output = ComplexInterval<S>;

    fn index(&self, i: usize) -> &ComplexInterval<S> {
        &self.0[i]
    }
}

impl<S: Scalar> fmt::Debug for IntervalBox<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.0).finish()
    }
}

/// Square complex point matrix, row-major.
#[derive(Clone, PartialEq)]
pub struct PointMatrix<S = f64> {
    n: usize,
    data: Vec<Complex<S>>,
}

impl<S: Scalar> PointMatrix<S> {
    pub fn from_rows(n: usize, data: Vec<Complex<S>>) -> Result<Self, IntervalError> {
        if n == 0 || data.len() != n * n {
            return Err(IntervalError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(PointMatrix { n, data })
    }

    pub fn identity(n: usize, level: PrecisionLevel) -> Self {
        let mut data = vec![Complex::zero(level); n * n];
        for i in 0..n {
            data[i * n + i] = Complex::one(level);
        }
        PointMatrix { n, data }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Complex<S> {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex<S>) {
        self.data[i * self.n + j] = z;
    }

    pub fn entries(&self) -> &[Complex<S>] {
        &self.data
    }

    pub fn mul_vec(&self, v: &[Complex<S>]) -> Vec<Complex<S>> {
        (0..self.n)
            .map(|i| {
                let mut acc = Complex::zero(v[0].level());
                for (j, vj) in v.iter().enumerate() {
                    acc = acc.add(&self.get(i, j).mul(vj));
                }
                acc
            })
            .collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let level = self.data[0].level();
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for k in 0..n {
                let mut acc = Complex::zero(level);
                for j in 0..n {
                    acc = acc.add(&self.get(i, j).mul(other.get(j, k)));
                }
                data.push(acc);
            }
        }
        PointMatrix { n, data }
    }

    pub fn to_interval(&self) -> IntervalMatrix<S> {
        IntervalMatrix {
            n: self.n,
            data: self.data.iter().map(ComplexInterval::point).collect(),
        }
    }

    pub fn convert<T: Scalar>(&self, level: PrecisionLevel) -> PointMatrix<T> {
        PointMatrix {
            n: self.n,
            data: self.data.iter().map(|z| z.convert(level)).collect(),
        }
    }
}

impl<S: Scalar> fmt::Debug for PointMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}

/// Square matrix over `IC`, row-major.
#[derive(Clone, PartialEq)]
pub struct IntervalMatrix<S = f64> {
    n: usize,
    data: Vec<ComplexInterval<S>>,
}

impl<S: Scalar> IntervalMatrix<S> {
    pub fn from_rows(n: usize, data: Vec<ComplexInterval<S>>) -> Result<Self, IntervalError> {
        if n == 0 || data.len() != n * n {
            return Err(IntervalError::DimensionMismatch {
                expected: n * n,
                found: data.len(),
            });
        }
        Ok(IntervalMatrix { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ComplexInterval<S> {
        &self.data[i * self.n + j]
    }

    pub fn entries(&self) -> &[ComplexInterval<S>] {
        &self.data
    }

    /// `1_n - self`.
    pub fn identity_minus(&self) -> Self {
        let level = self.data[0].re.lo().level();
        let one = ComplexInterval::point(&Complex::one(level));
        let zero = ComplexInterval::zero(level);
        let n = self.n;
        let data = self
            .data
            .iter()
            .enumerate()
            .map(|(k, a)| if k / n == k % n { one.sub(a) } else { zero.sub(a) })
            .collect();
        IntervalMatrix { n, data }
    }

    /// Product with another interval matrix, each column built with
    /// [`mat_vec`].
    pub fn mul(&self, other: &Self) -> Result<Self, IntervalError> {
        if self.n != other.n {
            return Err(IntervalError::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let n = self.n;
        let mut data = vec![ComplexInterval::zero(PrecisionLevel::DOUBLE); n * n];
        for k in 0..n {
            let column = IntervalBox((0..n).map(|j| other.get(j, k).clone()).collect());
            let prod = mat_vec(self, &column)?;
            for (i, v) in prod.0.into_iter().enumerate() {
                data[i * n + k] = v;
            }
        }
        Ok(IntervalMatrix { n, data })
    }

    pub fn contains(&self, b: &PointMatrix<S>) -> bool {
        self.n == b.n && self.data.iter().zip(&b.data).all(|(a, z)| a.contains(z))
    }
}

impl<S: Scalar> fmt::Debug for IntervalMatrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.data.chunks(self.n)).finish()
    }
}

/// `A·I = I_1·A[:,1] + ... + I_n·A[:,n]`.
pub fn mat_vec<S: Scalar>(
    a: &IntervalMatrix<S>,
    v: &IntervalBox<S>,
) -> Result<IntervalBox<S>, IntervalError> {
    let n = a.n;
    if v.len() != n {
        return Err(IntervalError::DimensionMismatch {
            expected: n,
            found: v.len(),
        });
    }
    let mut acc: Vec<ComplexInterval<S>> = (0..n).map(|i| v[0].mul(a.get(i, 0))).collect();
    for j in 1..n {
        for (i, slot) in acc.iter_mut().enumerate() {
            *slot = slot.add(&v[j].mul(a.get(i, j)));
        }
    }
    Ok(IntervalBox(acc))
}

/// Upper bound on `max_{B in A} ||B||_inf`, as the largest row sum of
/// entry magnitudes.
pub fn op_norm_inf<S: Scalar>(a: &IntervalMatrix<S>) -> S {
    let mut best: Option<S> = None;
    for row in a.data.chunks(a.n) {
        let mut sum = row[0].mag();
        for entry in &row[1..] {
            sum = sum.add_rnd(&entry.mag(), Round::Up);
        }
        best = Some(match best {
            Some(b) => b.max_of(&sum),
            None => sum,
        });
    }
    best.expect("matrix has at least one row")
}

/// Every coordinate of `inner` lies strictly inside the matching coordinate
/// of `outer`, in both real and imaginary parts.
pub fn subset_interior<S: Scalar>(inner: &IntervalBox<S>, outer: &IntervalBox<S>) -> bool {
    inner.len() == outer.len()
        && inner.0.iter().zip(&outer.0).all(|(a, b)| a.is_interior_of(b))
}

/// The closed rectangles intersect in every coordinate.
pub fn overlaps<S: Scalar>(a: &IntervalBox<S>, b: &IntervalBox<S>) -> bool {
    a.len() == b.len() && a.0.iter().zip(&b.0).all(|(x, y)| x.intersects(y))
}

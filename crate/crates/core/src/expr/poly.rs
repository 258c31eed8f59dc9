use std::collections::BTreeMap;

use super::ast::{CRational, Expr};

/// Expanded polynomial: exponent vector to nonzero coefficient.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Poly {
    pub n: usize,
    pub terms: BTreeMap<Vec<u32>, CRational>,
}

/// Expansion is abandoned beyond this many terms and the subtree is compiled
/// as written.
const MAX_TERMS: usize = 20_000;

impl Poly {
    pub fn zero(n: usize) -> Self {
        Poly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: CRational) -> Self {
        let mut p = Poly::zero(n);
        if !c.is_zero() {
            p.terms.insert(vec![0; n], c);
        }
        p
    }

    pub fn var(n: usize, k: usize) -> Self {
        let mut e = vec![0; n];
        e[k] = 1;
        let mut p = Poly::zero(n);
        p.terms.insert(e, CRational::one());
        p
    }

    pub fn as_constant(&self) -> Option<CRational> {
        match self.terms.len() {
            0 => Some(CRational::zero()),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.iter().all(|&d| d == 0).then(|| c.clone())
            }
            _ => None,
        }
    }

    fn insert(&mut self, e: Vec<u32>, c: CRational) {
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                if !c.is_zero() {
                    v.insert(c);
                }
            }
            Entry::Occupied(mut o) => {
                let s = o.get().add(&c);
                if s.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = s;
                }
            }
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut r = self.clone();
        for (e, c) in &o.terms {
            r.insert(e.clone(), c.clone());
        }
        r
    }

    pub fn neg(&self) -> Self {
        Poly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect() }
    }

    pub fn scale(&self, s: &CRational) -> Self {
        if s.is_zero() {
            return Poly::zero(self.n);
        }
        Poly { n: self.n, terms: self.terms.iter().map(|(e, c)| (e.clone(), c.mul(s))).collect() }
    }

    pub fn mul(&self, o: &Self) -> Option<Self> {
        if self.terms.len().saturating_mul(o.terms.len()) > MAX_TERMS * 8 {
            return None;
        }
        let mut r = Poly::zero(self.n);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                let e = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                r.insert(e, ca.mul(cb));
            }
        }
        (r.terms.len() <= MAX_TERMS).then_some(r)
    }

    pub fn pow(&self, k: u32) -> Option<Self> {
        let mut acc = Poly::constant(self.n, CRational::one());
        let mut sq = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq)?;
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq)?;
            }
        }
        Some(acc)
    }

    /// Number of monomials containing variable `v`, and its largest degree.
    pub fn occurrence(&self, v: usize) -> (usize, u32) {
        self.terms
            .keys()
            .filter(|e| e[v] > 0)
            .fold((0, 0), |(count, deg), e| (count + 1, deg.max(e[v])))
    }
}

/// Expands `e` into a polynomial, or `None` if it is not polynomial (or is
/// too large to expand).
pub(crate) fn to_poly(e: &Expr, n: usize) -> Option<Poly> {
    Some(match e {
        Expr::Const(c) => Poly::constant(n, c.clone()),
        Expr::Var(k) => Poly::var(n, *k),
        Expr::Add(a, b) => to_poly(a, n)?.add(&to_poly(b, n)?),
        Expr::Sub(a, b) => to_poly(a, n)?.add(&to_poly(b, n)?.neg()),
        Expr::Mul(a, b) => to_poly(a, n)?.mul(&to_poly(b, n)?)?,
        Expr::Div(a, b) => {
            let d = to_poly(b, n)?.as_constant()?.inv()?;
            to_poly(a, n)?.scale(&d)
        }
        Expr::Neg(a) => to_poly(a, n)?.neg(),
        Expr::Pow(a, k) => {
            let p = to_poly(a, n)?;
            if *k >= 0 {
                p.pow(*k as u32)?
            } else {
                Poly::constant(n, p.as_constant()?.pow(*k)?)
            }
        }
    })
}

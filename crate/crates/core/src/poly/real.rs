use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use super::Exponent;
use crate::error::{Error, Result};

/// Sparse real polynomial in `n` variables. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct RealPoly {
    n: usize,
    terms: BTreeMap<Exponent, f64>,
}

impl RealPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::zero(n), c);
        p
    }

    /// The variable `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::unit(n, i), 1.0);
        p
    }

    pub fn monomial(exp: Exponent, c: f64) -> Self {
        let mut p = Self::zero(exp.n());
        p.add_term(exp, c);
        p
    }

    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (Exponent, f64)>) -> Result<Self> {
        let mut p = Self::zero(n);
        for (e, c) in terms {
            if e.n() != n {
                return Err(Error::Dimension { expected: n, got: e.n() });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Accumulates `c·x^e`, dropping the term if the sum cancels to zero.
    pub fn add_term(&mut self, e: Exponent, c: f64) {
        debug_assert_eq!(e.n(), self.n);
        if c == 0.0 {
            return;
        }
        let entry = self.terms.entry(e);
        match entry {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v == 0.0 {
                    o.remove();
                } else {
                    *o.get_mut() = v;
                }
            }
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, f64)> {
        self.terms.iter().map(|(e, &c)| (e, c))
    }

    pub fn coeff(&self, e: &Exponent) -> f64 {
        self.terms.get(e).copied().unwrap_or(0.0)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Exponent::degree).max().unwrap_or(0)
    }

    /// Variables that occur in some term.
    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for e in self.terms.keys() {
            for i in e.support() {
                used[i] = true;
            }
        }
        (0..self.n).filter(|&i| used[i]).collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut p = Self::zero(self.n);
        for (e, c) in self.terms() {
            p.add_term(e.clone(), c * s);
        }
        p
    }

    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: point.len() });
        }
        Ok(self.terms().map(|(e, c)| c * e.eval(point)).sum())
    }

    /// Partial derivative with respect to `x_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.n);
        for (e, c) in self.terms() {
            let a = e.entries()[i];
            if a > 0 {
                let mut v = e.entries().to_vec();
                v[i] -= 1;
                p.add_term(Exponent::new(v), c * a as f64);
            }
        }
        p
    }

    /// Substitutes `x_i → (-1)^{s_i} x_i`.
    pub fn flip_signs(&self, s: &[bool]) -> Self {
        let mut p = Self::zero(self.n);
        for (e, c) in self.terms() {
            let odd = e
                .entries()
                .iter()
                .zip(s)
                .filter(|(&a, &flip)| flip && a % 2 == 1)
                .count();
            p.add_term(e.clone(), if odd % 2 == 1 { -c } else { c });
        }
        p
    }

    pub fn max_abs_diff(&self, other: &RealPoly) -> f64 {
        let d = self - other;
        d.terms().map(|(_, c)| c.abs()).fold(0.0, f64::max)
    }
}

impl Add for &RealPoly {
    type Output = RealPoly;
    fn add(self, rhs: &RealPoly) -> RealPoly {
        let mut p = self.clone();
        for (e, c) in rhs.terms() {
            p.add_term(e.clone(), c);
        }
        p
    }
}

impl Sub for &RealPoly {
    type Output = RealPoly;
    fn sub(self, rhs: &RealPoly) -> RealPoly {
        let mut p = self.clone();
        for (e, c) in rhs.terms() {
            p.add_term(e.clone(), -c);
        }
        p
    }
}

impl Mul for &RealPoly {
    type Output = RealPoly;
    fn mul(self, rhs: &RealPoly) -> RealPoly {
        let mut p = RealPoly::zero(self.n);
        for (a, ca) in self.terms() {
            for (b, cb) in rhs.terms() {
                p.add_term(a.add(b), ca * cb);
            }
        }
        p
    }
}

impl Neg for &RealPoly {
    type Output = RealPoly;
    fn neg(self) -> RealPoly {
        self.scale(-1.0)
    }
}

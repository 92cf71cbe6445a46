use std::collections::BTreeMap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use super::Exponent;
use crate::error::{Error, Result};

/// Sparse polynomial in `x` and `conj(x)`: `Σ f_{β,γ} x^β conj(x)^γ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPoly {
    n: usize,
    terms: BTreeMap<(Exponent, Exponent), Complex64>,
}

impl ComplexPoly {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: f64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::zero(n), Exponent::zero(n), Complex64::new(c, 0.0));
        p
    }

    /// The variable `x_i` (0-based).
    pub fn var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::unit(n, i), Exponent::zero(n), Complex64::new(1.0, 0.0));
        p
    }

    /// The conjugate variable `conj(x_i)`.
    pub fn conj_var(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::zero(n), Exponent::unit(n, i), Complex64::new(1.0, 0.0));
        p
    }

    /// `|x_i|² = x_i conj(x_i)`.
    pub fn abs_sq(n: usize, i: usize) -> Self {
        let mut p = Self::zero(n);
        p.add_term(Exponent::unit(n, i), Exponent::unit(n, i), Complex64::new(1.0, 0.0));
        p
    }

    pub fn from_terms(
        n: usize,
        terms: impl IntoIterator<Item = (Exponent, Exponent, Complex64)>,
    ) -> Result<Self> {
        let mut p = Self::zero(n);
        for (b, g, c) in terms {
            if b.n() != n || g.n() != n {
                return Err(Error::Dimension { expected: n, got: b.n().max(g.n()) });
            }
            p.add_term(b, g, c);
        }
        Ok(p)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn add_term(&mut self, beta: Exponent, gamma: Exponent, c: Complex64) {
        if c == Complex64::new(0.0, 0.0) {
            return;
        }
        match self.terms.entry((beta, gamma)) {
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let v = *o.get() + c;
                if v.re == 0.0 && v.im == 0.0 {
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

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &Exponent, Complex64)> {
        self.terms.iter().map(|((b, g), &c)| (b, g, c))
    }

    pub fn coeff(&self, beta: &Exponent, gamma: &Exponent) -> Complex64 {
        self.terms
            .get(&(beta.clone(), gamma.clone()))
            .copied()
            .unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `max{|β|, |γ|}` over the support; the half-degree used by complex relaxations.
    pub fn half_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|(b, g)| b.degree().max(g.degree()))
            .max()
            .unwrap_or(0)
    }

    /// `(max |β|, max |γ|)` over the support.
    pub fn degree_pair(&self) -> (u32, u32) {
        let db = self.terms.keys().map(|(b, _)| b.degree()).max().unwrap_or(0);
        let dg = self.terms.keys().map(|(_, g)| g.degree()).max().unwrap_or(0);
        (db, dg)
    }

    pub fn variables(&self) -> Vec<usize> {
        let mut used = vec![false; self.n];
        for (b, g) in self.terms.keys() {
            for i in b.support().chain(g.support()) {
                used[i] = true;
            }
        }
        (0..self.n).filter(|&i| used[i]).collect()
    }

    /// `conj(f) = Σ conj(f_{β,γ}) x^γ conj(x)^β`.
    pub fn conjugate(&self) -> Self {
        let mut p = Self::zero(self.n);
        for (b, g, c) in self.terms() {
            p.add_term(g.clone(), b.clone(), c.conj());
        }
        p
    }

    /// First term violating `f_{γ,β} = conj(f_{β,γ})` beyond a relative tolerance.
    pub fn self_conjugacy_violation(&self, tol: f64) -> Option<(Exponent, Exponent)> {
        let scale = self.terms.values().map(|c| c.norm()).fold(1.0, f64::max);
        for (b, g, c) in self.terms() {
            let mirror = self.coeff(g, b);
            if (mirror - c.conj()).norm() > tol * scale {
                return Some((b.clone(), g.clone()));
            }
        }
        None
    }

    pub fn is_self_conjugate(&self) -> bool {
        self.self_conjugacy_violation(1e-12).is_none()
    }

    pub fn check_self_conjugate(&self) -> Result<()> {
        match self.self_conjugacy_violation(1e-12) {
            None => Ok(()),
            Some((b, g)) => Err(Error::NotSelfConjugate {
                beta: b.entries().to_vec(),
                gamma: g.entries().to_vec(),
            }),
        }
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut p = Self::zero(self.n);
        for (b, g, c) in self.terms() {
            p.add_term(b.clone(), g.clone(), c * s);
        }
        p
    }

    pub fn eval(&self, point: &[Complex64]) -> Result<Complex64> {
        if point.len() != self.n {
            return Err(Error::Dimension { expected: self.n, got: point.len() });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (b, g, c) in self.terms() {
            let mut t = c;
            for (i, z) in point.iter().enumerate() {
                let (pb, pg) = (b.entries()[i], g.entries()[i]);
                if pb > 0 {
                    t *= z.powu(pb);
                }
                if pg > 0 {
                    t *= z.conj().powu(pg);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Evaluates a self-conjugate polynomial, discarding the (round-off) imaginary part.
    pub fn eval_real(&self, point: &[Complex64]) -> Result<f64> {
        Ok(self.eval(point)?.re)
    }

    /// Wirtinger derivative `∂f/∂x_i` (treating `conj(x)` as independent).
    pub fn derivative(&self, i: usize) -> Self {
        let mut p = Self::zero(self.n);
        for (b, g, c) in self.terms() {
            let a = b.entries()[i];
            if a > 0 {
                let mut v = b.entries().to_vec();
                v[i] -= 1;
                p.add_term(Exponent::new(v), g.clone(), c * a as f64);
            }
        }
        p
    }

    /// Substitutes `x_i → (-1)^{s_i} x_i`; the term `x^β conj(x)^γ` picks up the
    /// parity of `β_i + γ_i`.
    pub fn flip_signs(&self, s: &[bool]) -> Self {
        let mut p = Self::zero(self.n);
        for (b, g, c) in self.terms() {
            let odd = (0..self.n)
                .filter(|&i| s[i] && (b.entries()[i] + g.entries()[i]) % 2 == 1)
                .count();
            p.add_term(b.clone(), g.clone(), if odd % 2 == 1 { -c } else { c });
        }
        p
    }

    pub fn max_abs_diff(&self, other: &ComplexPoly) -> f64 {
        let d = self - other;
        d.terms().map(|(_, _, c)| c.norm()).fold(0.0, f64::max)
    }
}

impl Add for &ComplexPoly {
    type Output = ComplexPoly;
    fn add(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut p = self.clone();
        for (b, g, c) in rhs.terms() {
            p.add_term(b.clone(), g.clone(), c);
        }
        p
    }
}

impl Sub for &ComplexPoly {
    type Output = ComplexPoly;
    fn sub(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut p = self.clone();
        for (b, g, c) in rhs.terms() {
            p.add_term(b.clone(), g.clone(), -c);
        }
        p
    }
}

impl Mul for &ComplexPoly {
    type Output = ComplexPoly;
    fn mul(self, rhs: &ComplexPoly) -> ComplexPoly {
        let mut p = ComplexPoly::zero(self.n);
        for (b1, g1, c1) in self.terms() {
            for (b2, g2, c2) in rhs.terms() {
                p.add_term(b1.add(b2), g1.add(g2), c1 * c2);
            }
        }
        p
    }
}

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// A multi-index `α ∈ N^n` identifying the monomial `x^α`.
///
/// Ordering is graded lexicographic: lower total degree first, and within a
/// degree `x_1` dominates, so `(1,0) < (0,1)` and `[x]_2` for `n = 2` reads
/// `1, x1, x2, x1², x1x2, x2²`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Exponent(Vec<u32>);

impl Exponent {
    pub fn new(entries: Vec<u32>) -> Self {
        Self(entries)
    }

    pub fn zero(n: usize) -> Self {
        Self(vec![0; n])
    }

    /// The unit exponent `e_i` (0-based `i`).
    pub fn unit(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Self(e)
    }

    pub fn n(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&a| a == 0)
    }

    pub fn add(&self, other: &Exponent) -> Exponent {
        debug_assert_eq!(self.n(), other.n());
        Exponent(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, i: usize) -> Exponent {
        let mut e = self.0.clone();
        e[i] += 1;
        Exponent(e)
    }

    /// Variables with a positive power.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &a)| a > 0).map(|(i, _)| i)
    }

    /// True when every variable with a positive power lies in `vars`.
    pub fn supported_in(&self, vars: &[usize]) -> bool {
        self.support().all(|i| vars.contains(&i))
    }

    /// Entries reduced modulo 2.
    pub fn parity(&self) -> Vec<u8> {
        self.0.iter().map(|a| (a % 2) as u8).collect()
    }

    pub fn eval(&self, point: &[f64]) -> f64 {
        self.0
            .iter()
            .zip(point)
            .map(|(&a, &x)| x.powi(a as i32))
            .product()
    }
}

impl Ord for Exponent {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Exponent {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, a) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{a}")?;
        }
        write!(f, ")")
    }
}

impl From<Vec<u32>> for Exponent {
    fn from(v: Vec<u32>) -> Self {
        Self(v)
    }
}

/// All exponents with `|α| ≤ r` in graded lexicographic order.
pub fn monomial_basis(n: usize, r: usize) -> Vec<Exponent> {
    let mut out = Vec::with_capacity(binomial(n + r, r));
    for d in 0..=r {
        let mut current = vec![0u32; n];
        push_degree(&mut out, &mut current, 0, d as u32);
    }
    out
}

/// Monomial basis restricted to the variables in `vars` (exponents still live
/// in `N^n`).
pub fn monomial_basis_in(n: usize, vars: &[usize], r: usize) -> Vec<Exponent> {
    monomial_basis(vars.len(), r)
        .into_iter()
        .map(|local| {
            let mut e = vec![0u32; n];
            for (k, &v) in vars.iter().enumerate() {
                e[v] = local.0[k];
            }
            Exponent(e)
        })
        .collect()
}

// Fills positions `pos..` with a composition of `remaining`, leading
// positions first so that the result is in descending lex order.
fn push_degree(out: &mut Vec<Exponent>, current: &mut [u32], pos: usize, remaining: u32) {
    let n = current.len();
    if n == 0 {
        if remaining == 0 {
            out.push(Exponent(Vec::new()));
        }
        return;
    }
    if pos == n - 1 {
        current[pos] = remaining;
        out.push(Exponent(current.to_vec()));
        current[pos] = 0;
        return;
    }
    for a in (0..=remaining).rev() {
        current[pos] = a;
        push_degree(out, current, pos + 1, remaining - a);
    }
    current[pos] = 0;
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

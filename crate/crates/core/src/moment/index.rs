use std::cmp::Ordering;
use std::fmt::Debug;
use std::hash::Hash;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::poly::Exponent;

/// Scalar coefficients of linear combinations of moments.
pub trait Coeff:
    Copy
    + Debug
    + PartialEq
    + Default
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    fn from_f64(v: f64) -> Self;
    fn conj(self) -> Self;
    fn norm(self) -> f64;
    fn is_zero(self) -> bool;
    /// Bit pattern used for exact deduplication.
    fn bits(self) -> (u64, u64);
    fn re(self) -> f64;
    fn im(self) -> f64;
    /// Real fields drop the imaginary part.
    fn from_parts(re: f64, im: f64) -> Self;
}

impl Coeff for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn conj(self) -> Self {
        self
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
    fn bits(self) -> (u64, u64) {
        (self.to_bits(), 0)
    }
    fn re(self) -> f64 {
        self
    }
    fn im(self) -> f64 {
        0.0
    }
    fn from_parts(re: f64, _im: f64) -> Self {
        re
    }
}

impl Coeff for Complex64 {
    fn from_f64(v: f64) -> Self {
        Complex64::new(v, 0.0)
    }
    fn conj(self) -> Self {
        Complex64::conj(&self)
    }
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn bits(self) -> (u64, u64) {
        (self.re.to_bits(), self.im.to_bits())
    }
    fn re(self) -> f64 {
        self.re
    }
    fn im(self) -> f64 {
        self.im
    }
    fn from_parts(re: f64, im: f64) -> Self {
        Complex64::new(re, im)
    }
}

/// Identifies a moment variable. Real moments are keyed by a single
/// exponent; complex moments by a canonicalized exponent pair.
pub trait MomentKey: Clone + Ord + Eq + Hash + Debug + Send + Sync + 'static {
    type Coeff: Coeff;
    const COMPLEX: bool;

    /// The key of the normalization moment `y_0`.
    fn normalization(n: usize) -> Self;
    /// The catalog representative (drops any conjugation flag).
    fn canonical(&self) -> Self;
    /// The key of the conjugate moment.
    fn conjugate(&self) -> Self;
    /// True when this key refers to the conjugate of its catalog representative.
    fn is_conjugated(&self) -> bool;
    /// Effective exponent deciding sign-symmetry classes (complex: `β + γ`).
    fn parity_exponent(&self) -> Exponent;
    /// Whether the catalog entry carries an imaginary part.
    fn has_imaginary(&self) -> bool {
        false
    }
    /// Variables touched by the moment.
    fn support(&self) -> Vec<usize> {
        self.parity_exponent().support().collect()
    }
    /// Orient a value stored for the canonical key to this key.
    fn orient(&self, canonical_value: Self::Coeff) -> Self::Coeff {
        if self.is_conjugated() {
            canonical_value.conj()
        } else {
            canonical_value
        }
    }
}

/// Real moment index `y_α`.
pub type RealMomentIndex = Exponent;

impl MomentKey for Exponent {
    type Coeff = f64;
    const COMPLEX: bool = false;

    fn normalization(n: usize) -> Self {
        Exponent::zero(n)
    }
    fn canonical(&self) -> Self {
        self.clone()
    }
    fn conjugate(&self) -> Self {
        self.clone()
    }
    fn is_conjugated(&self) -> bool {
        false
    }
    fn parity_exponent(&self) -> Exponent {
        self.clone()
    }
}

/// Complex moment index `y_{β,γ}` stored as the canonical pair with `β ≥ γ`
/// in graded-lex order; `swapped` records that the requested moment was
/// `y_{γ,β} = conj(y_{β,γ})`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ComplexMomentIndex {
    beta: Exponent,
    gamma: Exponent,
    swapped: bool,
}

impl ComplexMomentIndex {
    pub fn new(beta: Exponent, gamma: Exponent) -> Self {
        if beta >= gamma {
            Self { beta, gamma, swapped: false }
        } else {
            Self { beta: gamma, gamma: beta, swapped: true }
        }
    }

    /// The stored canonical pair.
    pub fn canonical_pair(&self) -> (&Exponent, &Exponent) {
        (&self.beta, &self.gamma)
    }

    /// The pair as requested, i.e. `(β, γ)` such that this key denotes `y_{β,γ}`.
    pub fn pair(&self) -> (&Exponent, &Exponent) {
        if self.swapped {
            (&self.gamma, &self.beta)
        } else {
            (&self.beta, &self.gamma)
        }
    }

    pub fn swapped(&self) -> bool {
        self.swapped
    }

    /// Diagonal moments `y_{β,β}` are real-valued.
    pub fn is_diagonal(&self) -> bool {
        self.beta == self.gamma
    }

    fn total_degree(&self) -> u32 {
        self.beta.degree() + self.gamma.degree()
    }
}

impl Ord for ComplexMomentIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then_with(|| self.beta.cmp(&other.beta))
            .then_with(|| self.gamma.cmp(&other.gamma))
            .then_with(|| self.swapped.cmp(&other.swapped))
    }
}

impl PartialOrd for ComplexMomentIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Debug for ComplexMomentIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (b, g) = self.pair();
        write!(f, "y[{b:?},{g:?}]")
    }
}

impl MomentKey for ComplexMomentIndex {
    type Coeff = Complex64;
    const COMPLEX: bool = true;

    fn normalization(n: usize) -> Self {
        Self::new(Exponent::zero(n), Exponent::zero(n))
    }
    fn canonical(&self) -> Self {
        Self { beta: self.beta.clone(), gamma: self.gamma.clone(), swapped: false }
    }
    fn conjugate(&self) -> Self {
        if self.is_diagonal() {
            self.clone()
        } else {
            Self { beta: self.beta.clone(), gamma: self.gamma.clone(), swapped: !self.swapped }
        }
    }
    fn is_conjugated(&self) -> bool {
        self.swapped
    }
    fn parity_exponent(&self) -> Exponent {
        self.beta.add(&self.gamma)
    }
    fn has_imaginary(&self) -> bool {
        !self.is_diagonal()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_form_is_unique_per_conjugate_pair() {
        let e0 = Exponent::zero(1);
        let e1 = Exponent::unit(1, 0);
        let a = ComplexMomentIndex::new(e1.clone(), e0.clone());
        let b = ComplexMomentIndex::new(e0.clone(), e1.clone());
        assert!(!a.swapped() && b.swapped());
        assert_eq!(a.canonical(), b.canonical());
        assert_eq!(a.conjugate(), b);
        assert_eq!(b.pair(), (&e0, &e1));
        let d = ComplexMomentIndex::new(e1.clone(), e1.clone());
        assert_eq!(d.conjugate(), d);
        assert!(d.is_diagonal());
    }

    #[test]
    fn orientation_conjugates_swapped() {
        let k = ComplexMomentIndex::new(Exponent::zero(1), Exponent::unit(1, 0));
        let v = Complex64::new(0.0, 1.0);
        assert_eq!(k.orient(v), Complex64::new(0.0, -1.0));
    }
}

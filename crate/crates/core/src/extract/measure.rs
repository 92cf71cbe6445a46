use std::collections::BTreeMap;

use nalgebra::{ComplexField, DMatrix, Schur, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::moment::{Coeff, ComplexMomentIndex, MomentKey};
use crate::poly::{monomial_basis, Exponent};

/// Scalar field of atoms, tied to the moment keys it generates.
pub trait MeasureScalar: ComplexField<RealField = f64> + Copy + Coeff {
    type Key: MomentKey<Coeff = Self>;

    /// `Σ_k w_k · atom_k^α` (real) or `Σ_k w_k · atom_k^β conj(atom_k)^γ`.
    fn moment(atoms: &[Vec<Self>], weights: &[f64], key: &Self::Key) -> Self;
    /// Canonical keys of degree (real) or half-degree (complex) at most `bound`.
    fn keys_up_to(n: usize, bound: usize) -> Vec<Self::Key>;
    fn sample<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Self;
    /// Moment-matrix entry key for row monomial `a` and column monomial `b`.
    fn entry_key(a: &Exponent, b: &Exponent) -> Self::Key;
    /// Unitary eigenvector matrix of a symmetric (real) or normal (complex) matrix.
    fn eigenvectors(m: DMatrix<Self>) -> Option<DMatrix<Self>>;
}

fn pow<T: ComplexField<RealField = f64> + Copy>(z: T, e: u32) -> T {
    let mut acc = T::one();
    for _ in 0..e {
        acc *= z;
    }
    acc
}

impl MeasureScalar for f64 {
    type Key = Exponent;

    fn moment(atoms: &[Vec<f64>], weights: &[f64], key: &Exponent) -> f64 {
        atoms.iter().zip(weights).map(|(a, w)| w * key.eval(a)).sum()
    }

    fn keys_up_to(n: usize, bound: usize) -> Vec<Exponent> {
        monomial_basis(n, bound)
    }

    fn sample<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
        rng.gen_range(lo..hi)
    }

    fn entry_key(a: &Exponent, b: &Exponent) -> Exponent {
        a.add(b)
    }

    fn eigenvectors(m: DMatrix<f64>) -> Option<DMatrix<f64>> {
        let sym = (&m + m.transpose()) * 0.5;
        Some(SymmetricEigen::new(sym).eigenvectors)
    }
}

impl MeasureScalar for Complex64 {
    type Key = ComplexMomentIndex;

    fn moment(atoms: &[Vec<Complex64>], weights: &[f64], key: &ComplexMomentIndex) -> Complex64 {
        let (b, g) = key.pair();
        atoms
            .iter()
            .zip(weights)
            .map(|(a, &w)| {
                let mut t = Complex64::new(w, 0.0);
                for (i, z) in a.iter().enumerate() {
                    t *= pow(*z, b.entries()[i]) * pow(z.conj(), g.entries()[i]);
                }
                t
            })
            .sum()
    }

    fn keys_up_to(n: usize, bound: usize) -> Vec<ComplexMomentIndex> {
        let basis = monomial_basis(n, bound);
        let mut out = Vec::new();
        for b in &basis {
            for g in &basis {
                if b >= g {
                    out.push(ComplexMomentIndex::new(b.clone(), g.clone()));
                }
            }
        }
        out.sort();
        out
    }

    fn sample<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> Complex64 {
        Complex64::new(rng.gen_range(lo..hi), rng.gen_range(lo..hi))
    }

    fn entry_key(a: &Exponent, b: &Exponent) -> ComplexMomentIndex {
        ComplexMomentIndex::new(a.clone(), b.clone())
    }

    fn eigenvectors(m: DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
        Schur::try_new(m, 1e-14, 10_000).map(|s| s.unpack().0)
    }
}

/// Finitely atomic measure `Σ_k w_k δ_{atom_k}`.
#[derive(Clone, Debug, PartialEq)]
pub struct AtomicMeasure<T> {
    pub atoms: Vec<Vec<T>>,
    pub weights: Vec<f64>,
}

impl<T: MeasureScalar> AtomicMeasure<T> {
    pub fn new(atoms: Vec<Vec<T>>, weights: Vec<f64>) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(Error::Dimension { expected: atoms.len(), got: weights.len() });
        }
        if weights.iter().any(|&w| w <= 0.0) {
            return Err(Error::InvalidParameter("atom weights must be positive".into()));
        }
        if let Some(n) = atoms.first().map(Vec::len) {
            if let Some(a) = atoms.iter().find(|a| a.len() != n) {
                return Err(Error::Dimension { expected: n, got: a.len() });
            }
        }
        Ok(Self { atoms, weights })
    }

    pub fn dirac(point: Vec<T>) -> Self {
        Self { atoms: vec![point], weights: vec![1.0] }
    }

    /// `t` atoms in `n` variables with coordinates in `[-1, 1]` (both parts
    /// for complex atoms) and probability weights bounded away from 0.
    pub fn random<R: Rng>(rng: &mut R, n: usize, t: usize) -> Self {
        let atoms = (0..t).map(|_| (0..n).map(|_| T::sample(rng, -1.0, 1.0)).collect()).collect();
        let raw: Vec<f64> = (0..t).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = raw.iter().sum();
        Self { atoms, weights: raw.iter().map(|w| w / total).collect() }
    }

    pub fn n(&self) -> usize {
        self.atoms.first().map_or(0, Vec::len)
    }

    pub fn mass(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Numeric moments indexed by canonical key.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentAssignment<K: MomentKey> {
    pub values: BTreeMap<K, K::Coeff>,
}

impl<K: MomentKey> MomentAssignment<K> {
    /// Value of an oriented key; moments outside the assignment read as 0.
    pub fn value(&self, key: &K) -> K::Coeff {
        self.values
            .get(&key.canonical())
            .map_or_else(K::Coeff::default, |&v| key.orient(v))
    }

    pub fn get(&self, key: &K) -> Option<K::Coeff> {
        self.values.get(&key.canonical()).map(|&v| key.orient(v))
    }
}

/// Moments of a measure up to `bound` (degree for real, half-degree for complex).
pub fn moments_of<T: MeasureScalar>(
    measure: &AtomicMeasure<T>,
    bound: usize,
) -> MomentAssignment<T::Key> {
    let values = T::keys_up_to(measure.n(), bound)
        .into_iter()
        .map(|k| {
            let v = T::moment(&measure.atoms, &measure.weights, &k);
            (k, v)
        })
        .collect();
    MomentAssignment { values }
}

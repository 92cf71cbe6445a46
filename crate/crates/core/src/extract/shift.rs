use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::measure::MeasureScalar;
use crate::moment::MomentKey;
use crate::error::{Error, Result};
use crate::poly::monomial_basis;

/// Default numeric-rank threshold relative to the largest eigenvalue.
pub const DEFAULT_RANK_TOL: f64 = 1e-6;

const MAX_ATTEMPTS: usize = 5;

/// Shift operators `T_1..T_n` acting on `F^t`, with the Gram factor they were
/// built from.
#[derive(Clone, Debug)]
pub struct ShiftOperators<T: MeasureScalar> {
    pub t: usize,
    pub ops: Vec<DMatrix<T>>,
    /// `t × dim` factor; column `k` is `a_α` for the `k`-th basis monomial.
    pub factor: DMatrix<T>,
    pub residual: f64,
}

/// Factor a PSD moment matrix as `M_{pq} = a_q* a_p`, dropping eigenvalues
/// below `tol · max(1, ‖M‖)`.
///
/// Rows of the returned `t × dim` factor are `√λ_k u_kᵀ` in descending
/// eigenvalue order. For real `M` this is the usual `M = AᵀA`.
pub fn grammian_factor<T: MeasureScalar>(m: &DMatrix<T>, tol: f64) -> Result<(usize, DMatrix<T>)> {
    if !m.is_square() {
        return Err(Error::Dimension { expected: m.nrows(), got: m.ncols() });
    }
    let dim = m.nrows();
    if dim == 0 {
        return Ok((0, DMatrix::zeros(0, 0)));
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let eig = SymmetricEigen::new(herm);
    let norm = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let thr = tol * norm.max(1.0);
    let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -thr {
        return Err(Error::Indefinite(min));
    }
    let mut order: Vec<usize> = (0..dim).filter(|&k| eig.eigenvalues[k] > thr).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let t = order.len();
    let mut a = DMatrix::zeros(t, dim);
    for (row, &k) in order.iter().enumerate() {
        let s = T::from_real(eig.eigenvalues[k].sqrt());
        for col in 0..dim {
            a[(row, col)] = s * eig.eigenvectors[(col, k)];
        }
    }
    Ok((t, a))
}

/// Solve `T_i A_{≤r-1} = A_{shift,i}` for each variable.
///
/// `factor` has one column per monomial of `[x]_r` in graded lexicographic
/// order. Fails when the columns of degree at most `r - 1` do not span `F^t`.
pub fn build_shift_operators<T: MeasureScalar>(
    factor: &DMatrix<T>,
    n: usize,
    r: usize,
    tol: f64,
) -> Result<ShiftOperators<T>> {
    let basis = monomial_basis(n, r);
    if factor.ncols() != basis.len() {
        return Err(Error::Dimension { expected: basis.len(), got: factor.ncols() });
    }
    if r == 0 {
        return Err(Error::InvalidParameter("shift operators need r >= 1".into()));
    }
    let t = factor.nrows();
    let low: Vec<usize> = (0..basis.len()).filter(|&k| basis[k].degree() < r as u32).collect();
    let a_low = factor.select_columns(&low);

    // A_low has full row rank t exactly when its t × t Gram matrix is
    // nonsingular; singular values are square roots of the Gram eigenvalues.
    let gram = &a_low * a_low.adjoint();
    let eig = SymmetricEigen::new(gram.clone());
    let smax = eig.eigenvalues.iter().fold(0.0f64, |a, v| a.max(*v)).max(0.0).sqrt();
    let rank = eig.eigenvalues.iter().filter(|&&v| v.max(0.0).sqrt() > tol * smax.max(1.0)).count();
    if rank < t {
        return Err(Error::Extraction(format!(
            "columns of degree below {r} have rank {rank} < {t}"
        )));
    }
    let pinv = match gram.cholesky() {
        Some(c) => a_low.adjoint() * c.inverse(),
        None => return Err(Error::Extraction("unshifted columns are numerically dependent".into())),
    };

    let mut ops = Vec::with_capacity(n);
    let mut residual = 0.0f64;
    for i in 0..n {
        let shifted: Vec<usize> = low
            .iter()
            .map(|&k| {
                let target = basis[k].add_unit(i);
                basis.binary_search(&target).expect("shifted monomial lies in [x]_r")
            })
            .collect();
        let a_shift = factor.select_columns(&shifted);
        let op = &a_shift * &pinv;
        residual = residual.max((&op * &a_low - &a_shift).norm());
        ops.push(op);
    }
    Ok(ShiftOperators { t, ops, factor: factor.clone(), residual })
}

/// Largest entry of `T - Tᵀ`.
pub fn check_symmetry<T: MeasureScalar>(op: &DMatrix<T>) -> f64 {
    (op - op.transpose()).iter().fold(0.0, |a, v| a.max(v.modulus()))
}

/// Spectral norm of `T*T - TT*`.
pub fn check_normality<T: MeasureScalar>(op: &DMatrix<T>) -> f64 {
    let defect = op.adjoint() * op - op * op.adjoint();
    spectral_norm(&defect)
}

/// Largest spectral norm of a pairwise commutator `T_i T_j - T_j T_i`.
pub fn commutator_norm<T: MeasureScalar>(ops: &[DMatrix<T>]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let c = &ops[i] * &ops[j] - &ops[j] * &ops[i];
            worst = worst.max(spectral_norm(&c));
        }
    }
    worst
}

fn spectral_norm<T: MeasureScalar>(m: &DMatrix<T>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    let g = m.adjoint() * m;
    SymmetricEigen::new(g).eigenvalues.iter().fold(0.0f64, |a, v| a.max(*v)).sqrt()
}

/// Recover `t` atoms by diagonalizing a random convex combination of the
/// shift operators. Atom `k` has coordinates `v_k* T_i v_k`.
///
/// A combination is accepted when its eigenvalues are separated by more than
/// the noise in the operators (residual and symmetry or normality defect);
/// otherwise fresh weights are drawn, up to five times.
pub fn extract_atoms<T: MeasureScalar>(ops: &ShiftOperators<T>, seed: u64) -> Result<Vec<Vec<T>>> {
    let t = ops.t;
    if t == 0 {
        return Ok(Vec::new());
    }
    let scale = ops.ops.iter().map(spectral_norm).fold(1e-300, f64::max);
    let defect = ops.ops.iter().fold(ops.residual, |a, op| {
        a.max(check_normality(op) / scale).max(if T::Key::COMPLEX { 0.0 } else { check_symmetry(op) })
    });
    let sep = (1e3 * defect).max(1e-6) * scale;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<(f64, DMatrix<T>)> = None;
    for _ in 0..MAX_ATTEMPTS {
        let raw: Vec<f64> = ops.ops.iter().map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mut comb = DMatrix::<T>::zeros(t, t);
        for (op, l) in ops.ops.iter().zip(&raw) {
            comb += op.scale(l / total);
        }
        let Some(vecs) = T::eigenvectors(comb.clone()) else { continue };
        let values: Vec<T> = (0..t).map(|k| quad(&comb, &vecs, k)).collect();
        let mut gap = f64::INFINITY;
        for a in 0..t {
            for b in a + 1..t {
                gap = gap.min((values[a] - values[b]).modulus());
            }
        }
        if best.as_ref().is_none_or(|(g, _)| gap > *g) {
            best = Some((gap, vecs));
        }
        if gap > sep {
            break;
        }
    }
    match best {
        Some((gap, vecs)) if gap > 1e-6 * scale => Ok((0..t)
            .map(|k| ops.ops.iter().map(|op| quad(op, &vecs, k)).collect())
            .collect()),
        _ => Err(Error::Extraction(format!(
            "eigenvalues stayed clustered after {MAX_ATTEMPTS} random combinations"
        ))),
    }
}

fn quad<T: MeasureScalar>(m: &DMatrix<T>, vecs: &DMatrix<T>, k: usize) -> T {
    let v = vecs.column(k);
    (v.adjoint() * m * v)[(0, 0)]
}

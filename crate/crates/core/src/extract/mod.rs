//! Shift-operator reconstruction, atom extraction and optimality certificates.

mod certify;
mod measure;
mod shift;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

pub use certify::{certify_complex, certify_real, AtomReport, Certificate};
pub use measure::{moments_of, AtomicMeasure, MeasureScalar, MomentAssignment};
pub use shift::{
    build_shift_operators, check_normality, check_symmetry, commutator_norm, extract_atoms,
    grammian_factor, ShiftOperators, DEFAULT_RANK_TOL,
};

use crate::error::{Error, Result};
use crate::moment::MomentKey;
use crate::poly::monomial_basis;

/// Numeric `M_r` from a moment lookup, rows and columns in `[x]_r` order.
pub fn moment_matrix_from<T: MeasureScalar>(
    lookup: impl Fn(&T::Key) -> T,
    n: usize,
    r: usize,
) -> DMatrix<T> {
    let basis = monomial_basis(n, r);
    DMatrix::from_fn(basis.len(), basis.len(), |p, q| lookup(&T::entry_key(&basis[p], &basis[q])))
}

pub fn numeric_moment_matrix<K: MomentKey>(
    y: &MomentAssignment<K>,
    n: usize,
    r: usize,
) -> DMatrix<K::Coeff>
where
    K::Coeff: MeasureScalar<Key = K>,
{
    moment_matrix_from(|k: &K| y.value(k), n, r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractOptions {
    /// Numeric rank threshold relative to the largest eigenvalue.
    pub rank_tol: f64,
    pub seed: u64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self { rank_tol: DEFAULT_RANK_TOL, seed: 0 }
    }
}

/// Atoms with the diagnostics of the operators they came from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    pub rank: usize,
    pub residual: f64,
    pub symmetry_defect: f64,
    pub normality_defect: f64,
    pub commutator_norm: f64,
}

/// Full extraction from a moment lookup: `M_r`, Gram factor, shifts, atoms.
///
/// Operators whose pairwise commutators exceed `1e-3 · max(1, ‖T‖)` are
/// treated as not coming from an atomic measure.
pub fn extract_from_moments<T: MeasureScalar>(
    lookup: impl Fn(&T::Key) -> T,
    n: usize,
    r: usize,
    opts: &ExtractOptions,
) -> Result<(Vec<Vec<T>>, ExtractionReport)> {
    let m = moment_matrix_from(lookup, n, r);
    let (_, factor) = grammian_factor(&m, opts.rank_tol)?;
    let ops = build_shift_operators(&factor, n, r, opts.rank_tol)?;
    let report = ExtractionReport {
        rank: ops.t,
        residual: ops.residual,
        symmetry_defect: ops.ops.iter().map(check_symmetry).fold(0.0, f64::max),
        normality_defect: ops.ops.iter().map(check_normality).fold(0.0, f64::max),
        commutator_norm: commutator_norm(&ops.ops),
    };
    let scale = ops.ops.iter().map(|t| t.norm()).fold(1.0, f64::max);
    if report.commutator_norm > 1e-3 * scale * scale {
        return Err(Error::Extraction(format!(
            "shift operators do not commute (defect {:.2e})",
            report.commutator_norm
        )));
    }
    let atoms = extract_atoms(&ops, opts.seed)?;
    Ok((atoms, report))
}

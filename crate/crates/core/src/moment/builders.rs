//! Moment, localizing and shift-operator blocks.
//!
//! Every block is a Gram-type matrix over a list of "row functions". In the
//! real case row `p` is the monomial `x^{a_p}` and entry `(p, q)` is
//! `L_y(g · x^{a_p} x^{a_q})`. In the complex case row `p` is
//! `x^{a_p} conj(x)^{b_p}` and entry `(p, q)` is
//! `L_y(g · x^{a_p + b_q} conj(x)^{b_p + a_q})`, which is Hermitian whenever
//! `g` is self-conjugate.

use num_complex::Complex64;

use super::{BlockRole, BlockTag, ComplexMomentIndex, LinComb, SymbolicMatrix};
use crate::error::Result;
use crate::poly::{monomial_basis, ComplexPoly, Exponent, RealPoly};

pub(crate) fn real_gram_block(
    rows: Vec<Exponent>,
    g: Option<&RealPoly>,
    tag: BlockTag,
) -> SymbolicMatrix<Exponent> {
    let rows_ref = rows.clone();
    SymbolicMatrix::from_fn(rows, tag, |p, q| {
        let base = rows_ref[p].add(&rows_ref[q]);
        match g {
            None => LinComb::single(base, 1.0),
            Some(g) => {
                let mut l = LinComb::new();
                for (a, c) in g.terms() {
                    l.add_term(base.add(a), c);
                }
                l
            }
        }
    })
}

pub(crate) fn complex_gram_block(
    rows: Vec<(Exponent, Exponent)>,
    g: Option<&ComplexPoly>,
    tag: BlockTag,
) -> SymbolicMatrix<ComplexMomentIndex> {
    let labels = rows.iter().map(|(a, b)| a.add(b)).collect();
    SymbolicMatrix::from_fn(labels, tag, |p, q| {
        let (ap, bp) = &rows[p];
        let (aq, bq) = &rows[q];
        let hol = ap.add(bq);
        let anti = bp.add(aq);
        match g {
            None => LinComb::single(ComplexMomentIndex::new(hol, anti), Complex64::new(1.0, 0.0)),
            Some(g) => {
                let mut l = LinComb::new();
                for (b2, g2, c) in g.terms() {
                    l.add_term(ComplexMomentIndex::new(hol.add(b2), anti.add(g2)), c);
                }
                l
            }
        }
    })
}

/// `M_r(y)` on an explicit monomial basis.
pub fn real_moment_block(basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Exponent> {
    real_gram_block(basis.to_vec(), None, tag)
}

/// `M_r(g y)` on an explicit monomial basis.
pub fn real_localizing_block(
    g: &RealPoly,
    basis: &[Exponent],
    tag: BlockTag,
) -> SymbolicMatrix<Exponent> {
    real_gram_block(basis.to_vec(), Some(g), tag)
}

/// `[[M(y), M(x_i y)], [M(x_i y), M(x_i² y)]]` on an explicit basis; the
/// second half of the rows is `x_i · basis`.
pub fn real_shift_block_on(i: usize, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Exponent> {
    let mut rows = basis.to_vec();
    rows.extend(basis.iter().map(|a| a.add_unit(i)));
    real_gram_block(rows, None, tag)
}

pub fn complex_moment_block(
    basis: &[Exponent],
    tag: BlockTag,
) -> SymbolicMatrix<ComplexMomentIndex> {
    complex_gram_block(holomorphic_rows(basis), None, tag)
}

pub fn complex_localizing_block(
    g: &ComplexPoly,
    basis: &[Exponent],
    tag: BlockTag,
) -> Result<SymbolicMatrix<ComplexMomentIndex>> {
    g.check_self_conjugate()?;
    Ok(complex_gram_block(holomorphic_rows(basis), Some(g), tag))
}

/// `[[M(y), M(x_i y)], [M(conj(x_i) y), M(|x_i|² y)]]` on an explicit basis;
/// the second half of the rows is `conj(x_i) · basis`.
pub fn complex_shift_block_on(
    i: usize,
    basis: &[Exponent],
    tag: BlockTag,
) -> SymbolicMatrix<ComplexMomentIndex> {
    let n = basis.first().map(Exponent::n).unwrap_or(0);
    let mut rows = holomorphic_rows(basis);
    rows.extend(basis.iter().map(|a| (a.clone(), Exponent::unit(n, i))));
    complex_gram_block(rows, None, tag)
}

fn holomorphic_rows(basis: &[Exponent]) -> Vec<(Exponent, Exponent)> {
    basis
        .iter()
        .map(|a| (a.clone(), Exponent::zero(a.n())))
        .collect()
}

/// Real moment matrix `M_r(y)` over `[x]_r`.
pub fn real_moment_matrix(n: usize, r: usize) -> SymbolicMatrix<Exponent> {
    real_moment_block(&monomial_basis(n, r), BlockTag::new(BlockRole::Moment { order: r }))
}

/// Real localizing matrix `M_r(g y)` over `[x]_r`.
pub fn real_localizing_matrix(g: &RealPoly, r: usize) -> SymbolicMatrix<Exponent> {
    real_localizing_block(
        g,
        &monomial_basis(g.n(), r),
        BlockTag::new(BlockRole::Localizing { constraint: 0, order: r }),
    )
}

/// Real shift block for variable `i` (0-based) at order `s`.
pub fn real_shift_block(n: usize, i: usize, s: usize) -> SymbolicMatrix<Exponent> {
    real_shift_block_on(
        i,
        &monomial_basis(n, s),
        BlockTag::new(BlockRole::Shift { var: i, order: s }),
    )
}

pub fn complex_moment_matrix(n: usize, r: usize) -> SymbolicMatrix<ComplexMomentIndex> {
    complex_moment_block(&monomial_basis(n, r), BlockTag::new(BlockRole::Moment { order: r }))
}

pub fn complex_localizing_matrix(
    g: &ComplexPoly,
    r: usize,
) -> Result<SymbolicMatrix<ComplexMomentIndex>> {
    complex_localizing_block(
        g,
        &monomial_basis(g.n(), r),
        BlockTag::new(BlockRole::Localizing { constraint: 0, order: r }),
    )
}

pub fn complex_shift_block(n: usize, i: usize, s: usize) -> SymbolicMatrix<ComplexMomentIndex> {
    complex_shift_block_on(
        i,
        &monomial_basis(n, s),
        BlockTag::new(BlockRole::Shift { var: i, order: s }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moment::MomentKey;
    use nalgebra::DMatrix;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn only_key<K: MomentKey>(l: &LinComb<K>) -> K {
        assert_eq!(l.len(), 1);
        l.keys().next().unwrap().clone()
    }

    #[test]
    fn univariate_moment_matrix() {
        let m = real_moment_matrix(1, 1);
        assert_eq!(only_key(m.entry(0, 0)), e(&[0]));
        assert_eq!(only_key(m.entry(0, 1)), e(&[1]));
        assert_eq!(only_key(m.entry(1, 1)), e(&[2]));
        // Dirac at 2
        let num = m.instantiate(|a| 2f64.powi(a.degree() as i32));
        assert_eq!(num, DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]));
    }

    #[test]
    fn bivariate_cross_entry() {
        let m = real_moment_matrix(2, 1);
        assert_eq!(m.dim(), 3);
        assert_eq!(only_key(m.entry(1, 2)), e(&[1, 1]));
    }

    #[test]
    fn localizing_entries() {
        let g = &RealPoly::constant(1, 1.0) - &RealPoly::monomial(e(&[2]), 1.0);
        let m = real_localizing_matrix(&g, 0);
        assert_eq!(m.dim(), 1);
        assert_eq!(m.entry(0, 0).coeff(&e(&[0])), 1.0);
        assert_eq!(m.entry(0, 0).coeff(&e(&[2])), -1.0);

        let g2 = &(&RealPoly::constant(2, 1.0) - &RealPoly::monomial(e(&[2, 0]), 1.0))
            - &RealPoly::monomial(e(&[0, 2]), 1.0);
        let m2 = real_localizing_matrix(&g2, 1);
        let x1x1 = m2.entry(1, 1);
        assert_eq!(x1x1.len(), 3);
        assert_eq!(x1x1.coeff(&e(&[2, 0])), 1.0);
        assert_eq!(x1x1.coeff(&e(&[4, 0])), -1.0);
        assert_eq!(x1x1.coeff(&e(&[2, 2])), -1.0);
        // Dirac at (1,0): g vanishes, so the localizing entry is 0
        let v = x1x1.eval(|a| a.eval(&[1.0, 0.0]));
        assert_eq!(v, 0.0);
    }

    #[test]
    fn shift_block_layout() {
        let b = real_shift_block(1, 0, 0);
        assert_eq!(b.dim(), 2);
        assert_eq!(only_key(b.entry(0, 1)), e(&[1]));
        assert_eq!(only_key(b.entry(1, 1)), e(&[2]));

        let b = real_shift_block(2, 1, 1);
        let basis = monomial_basis(2, 1);
        for (p, bp) in basis.iter().enumerate() {
            for (q, bq) in basis.iter().enumerate() {
                assert_eq!(only_key(b.entry(p, 3 + q)), bp.add(bq).add_unit(1));
            }
        }
        assert!(b.is_structurally_symmetric());
    }

    #[test]
    fn complex_moment_matrix_layout() {
        let m = complex_moment_matrix(1, 1);
        let k01 = only_key(m.entry(0, 1));
        let k10 = only_key(m.entry(1, 0));
        assert_eq!(k01.pair(), (&e(&[0]), &e(&[1])));
        assert_eq!(k10, k01.conjugate());
        assert!(m.is_structurally_symmetric());
        // Dirac at i: [[1, -i], [i, 1]]
        let w = Complex64::new(0.0, 1.0);
        let num = m.instantiate(|k| {
            let (b, g) = k.pair();
            w.powu(b.degree()) * w.conj().powu(g.degree())
        });
        assert_eq!(num[(0, 1)], Complex64::new(0.0, -1.0));
        assert_eq!(num[(1, 0)], Complex64::new(0.0, 1.0));
    }

    #[test]
    fn complex_localizing_disc() {
        let g = &ComplexPoly::constant(1, 1.0) - &ComplexPoly::abs_sq(1, 0);
        let m = complex_localizing_matrix(&g, 0).unwrap();
        let l = m.entry(0, 0);
        assert_eq!(l.len(), 2);
        assert_eq!(
            l.coeff(&ComplexMomentIndex::new(e(&[1]), e(&[1]))),
            Complex64::new(-1.0, 0.0)
        );
        assert!(complex_localizing_matrix(&ComplexPoly::var(1, 0), 0).is_err());
    }

    #[test]
    fn complex_shift_block_layout() {
        let b = complex_shift_block(1, 0, 0);
        assert_eq!(only_key(b.entry(0, 1)).pair(), (&e(&[1]), &e(&[0])));
        assert_eq!(only_key(b.entry(1, 0)).pair(), (&e(&[0]), &e(&[1])));
        assert_eq!(only_key(b.entry(1, 1)).pair(), (&e(&[1]), &e(&[1])));

        let b = complex_shift_block(2, 0, 1);
        let basis = monomial_basis(2, 1);
        let k = basis.len();
        for (p, bp) in basis.iter().enumerate() {
            for (q, bq) in basis.iter().enumerate() {
                let key = only_key(b.entry(k + p, k + q));
                assert_eq!(key.pair(), (&bp.add_unit(0), &bq.add_unit(0)));
            }
        }
        assert!(b.is_structurally_symmetric());
    }
}

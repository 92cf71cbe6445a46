use std::collections::HashSet;

use super::builders::{complex_gram_block, real_gram_block};
use super::{BlockRole, BlockTag, Coeff, ComplexMomentIndex, LinComb, MomentKey, SymbolicMatrix};
use crate::error::{Error, Result};
use crate::poly::{
    monomial_basis, ComplexPoly, ConstraintKind, Exponent, HalfDegrees, Polynomial, Pop, RealPoly,
};
use crate::structure::StructureMode;

/// Glue between a polynomial type and the moment keys / blocks it induces.
pub trait MomentField: Polynomial {
    type Key: MomentKey;

    /// `L_y(p)`.
    fn lincomb(&self) -> LinComb<Self::Key>;
    fn half_degrees_of(pop: &Pop<Self>) -> Result<HalfDegrees>;
    /// Moment block (`g = None`) or localizing block over `basis`.
    fn gram(g: Option<&Self>, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Self::Key>;
    /// Shift block for variable `i` over `basis`.
    fn shift(i: usize, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Self::Key>;
}

impl MomentField for RealPoly {
    type Key = Exponent;

    fn lincomb(&self) -> LinComb<Exponent> {
        let mut l = LinComb::new();
        for (a, c) in self.terms() {
            l.add_term(a.clone(), c);
        }
        l
    }

    fn half_degrees_of(pop: &Pop<Self>) -> Result<HalfDegrees> {
        Ok(pop.half_degrees())
    }

    fn gram(g: Option<&Self>, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Exponent> {
        real_gram_block(basis.to_vec(), g, tag)
    }

    fn shift(i: usize, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<Exponent> {
        super::real_shift_block_on(i, basis, tag)
    }
}

impl MomentField for ComplexPoly {
    type Key = ComplexMomentIndex;

    fn lincomb(&self) -> LinComb<ComplexMomentIndex> {
        let mut l = LinComb::new();
        for (b, g, c) in self.terms() {
            l.add_term(ComplexMomentIndex::new(b.clone(), g.clone()), c);
        }
        l
    }

    fn half_degrees_of(pop: &Pop<Self>) -> Result<HalfDegrees> {
        pop.half_degrees()
    }

    fn gram(
        g: Option<&Self>,
        basis: &[Exponent],
        tag: BlockTag,
    ) -> SymbolicMatrix<ComplexMomentIndex> {
        let rows = basis.iter().map(|a| (a.clone(), Exponent::zero(a.n()))).collect();
        complex_gram_block(rows, g, tag)
    }

    fn shift(i: usize, basis: &[Exponent], tag: BlockTag) -> SymbolicMatrix<ComplexMomentIndex> {
        super::complex_shift_block_on(i, basis, tag)
    }
}

/// Which hierarchy a relaxation belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Las,
    /// Shift-strengthened relaxation with block order `s`.
    Slas { s: usize },
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Method::Las => write!(f, "LAS"),
            Method::Slas { s } => write!(f, "S-LAS(s={s})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RelaxationMeta {
    pub r: usize,
    pub method: Method,
    pub structure: StructureMode,
}

/// Linear constraint `lhs = rhs` on the moments.
#[derive(Clone, Debug, PartialEq)]
pub struct Equality<K: MomentKey> {
    pub lhs: LinComb<K>,
    pub rhs: K::Coeff,
}

/// A moment relaxation: minimize `L_y(f)` over PSD blocks and linear equalities.
#[derive(Clone, Debug, PartialEq)]
pub struct Relaxation<K: MomentKey> {
    pub n: usize,
    /// Canonical moment keys in sorted order.
    pub catalog: Vec<K>,
    pub objective: LinComb<K>,
    pub blocks: Vec<SymbolicMatrix<K>>,
    /// The first entry is always the normalization `y_0 = 1`.
    pub equalities: Vec<Equality<K>>,
    pub meta: RelaxationMeta,
}

pub type RealRelaxation = Relaxation<Exponent>;
pub type ComplexRelaxation = Relaxation<ComplexMomentIndex>;

impl<K: MomentKey> Relaxation<K> {
    pub fn is_complex(&self) -> bool {
        K::COMPLEX
    }

    /// Position of a key's canonical representative in the catalog.
    pub fn catalog_index(&self, key: &K) -> Option<usize> {
        self.catalog.binary_search(&key.canonical()).ok()
    }

    pub fn block_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(SymbolicMatrix::dim).collect()
    }

    pub fn max_block_dim(&self) -> usize {
        self.block_dims().into_iter().max().unwrap_or(0)
    }

    /// Recomputes the catalog from blocks, objective and equalities.
    pub fn rebuild_catalog(&mut self) {
        self.catalog = collect_catalog(self.n, &self.objective, &self.blocks, &self.equalities);
    }

    /// Every referenced key has its canonical form in the catalog.
    pub fn is_catalog_closed(&self) -> bool {
        let keys = self
            .blocks
            .iter()
            .flat_map(|b| b.keys())
            .chain(self.objective.keys())
            .chain(self.equalities.iter().flat_map(|e| e.lhs.keys()));
        let mut ok = true;
        for k in keys {
            ok &= self.catalog_index(k).is_some();
        }
        ok
    }
}

fn collect_catalog<K: MomentKey>(
    n: usize,
    objective: &LinComb<K>,
    blocks: &[SymbolicMatrix<K>],
    equalities: &[Equality<K>],
) -> Vec<K> {
    let mut set = std::collections::BTreeSet::new();
    set.insert(K::normalization(n));
    for k in blocks
        .iter()
        .flat_map(|b| b.keys())
        .chain(objective.keys())
        .chain(equalities.iter().flat_map(|e| e.lhs.keys()))
    {
        set.insert(k.canonical());
    }
    set.into_iter().collect()
}

/// Accumulates blocks and deduplicated equality rows.
#[derive(Debug)]
pub struct RelaxationBuilder<K: MomentKey> {
    n: usize,
    objective: LinComb<K>,
    blocks: Vec<SymbolicMatrix<K>>,
    equalities: Vec<Equality<K>>,
    seen: HashSet<Vec<(K, (u64, u64))>>,
}

impl<K: MomentKey> RelaxationBuilder<K> {
    pub fn new(n: usize, objective: LinComb<K>) -> Self {
        let mut b = Self {
            n,
            objective,
            blocks: Vec::new(),
            equalities: Vec::new(),
            seen: HashSet::new(),
        };
        b.push_equality(LinComb::single(K::normalization(n), K::Coeff::from_f64(1.0)), K::Coeff::from_f64(1.0));
        b
    }

    pub fn block(&mut self, m: SymbolicMatrix<K>) {
        self.blocks.push(m);
    }

    /// Adds `lhs = rhs`; exact duplicates (and, for complex keys, exact
    /// conjugates of homogeneous rows) are dropped.
    pub fn push_equality(&mut self, lhs: LinComb<K>, rhs: K::Coeff) {
        if lhs.is_empty() {
            return;
        }
        let mut fp = lhs.fingerprint();
        fp.push((K::normalization(self.n), rhs.bits()));
        if self.seen.contains(&fp) {
            return;
        }
        if K::COMPLEX && rhs.is_zero() {
            let mut cfp = lhs.conjugate().fingerprint();
            cfp.push((K::normalization(self.n), rhs.bits()));
            if self.seen.contains(&cfp) {
                return;
            }
        }
        self.seen.insert(fp);
        self.equalities.push(Equality { lhs, rhs });
    }

    /// Every upper-triangular entry of `m` is constrained to zero.
    pub fn zero_entries(&mut self, m: &SymbolicMatrix<K>) {
        for i in 0..m.dim() {
            for j in i..m.dim() {
                self.push_equality(m.entry(i, j).clone(), K::Coeff::default());
            }
        }
    }

    pub fn finish(self, meta: RelaxationMeta) -> Relaxation<K> {
        let catalog = collect_catalog(self.n, &self.objective, &self.blocks, &self.equalities);
        Relaxation {
            n: self.n,
            catalog,
            objective: self.objective,
            blocks: self.blocks,
            equalities: self.equalities,
            meta,
        }
    }
}

pub(crate) fn check_order(r: usize, hd: &HalfDegrees) -> Result<()> {
    if r < hd.d_min {
        return Err(Error::OrderTooLow { r, d_min: hd.d_min });
    }
    Ok(())
}

/// Localizing blocks (inequalities) and zero rows (equalities) over a basis
/// chosen per constraint.
pub(crate) fn add_constraints<P: MomentField>(
    b: &mut RelaxationBuilder<P::Key>,
    pop: &Pop<P>,
    r: usize,
    hd: &HalfDegrees,
    mut basis_for: impl FnMut(usize, usize) -> (Vec<Exponent>, Option<usize>),
) {
    for (idx, c) in pop.constraints.iter().enumerate() {
        let order = r - hd.constraints[idx];
        let (basis, clique) = basis_for(idx, order);
        let tag = BlockTag::new(BlockRole::Localizing { constraint: idx, order }).in_clique(clique);
        let m = P::gram(Some(&c.poly), &basis, tag);
        match c.kind {
            ConstraintKind::Ge => b.block(m),
            ConstraintKind::Eq => b.zero_entries(&m),
        }
    }
}

fn dense<P: MomentField>(
    pop: &Pop<P>,
    r: usize,
    shift: Option<usize>,
    keep_moment: bool,
) -> Result<Relaxation<P::Key>> {
    let hd = P::half_degrees_of(pop)?;
    check_order(r, &hd)?;
    let n = pop.n;
    let mut b = RelaxationBuilder::new(n, pop.min_objective().lincomb());
    if keep_moment {
        b.block(P::gram(None, &monomial_basis(n, r), BlockTag::new(BlockRole::Moment { order: r })));
    }
    add_constraints(&mut b, pop, r, &hd, |_, order| (monomial_basis(n, order), None));
    if let Some(s) = shift {
        let basis = monomial_basis(n, s);
        for i in 0..n {
            b.block(P::shift(i, &basis, BlockTag::new(BlockRole::Shift { var: i, order: s })));
        }
    }
    let method = match shift {
        None => Method::Las,
        Some(s) => Method::Slas { s },
    };
    Ok(b.finish(RelaxationMeta { r, method, structure: StructureMode::Dense }))
}

/// Real moment relaxation (LAS) of order `r`.
pub fn assemble_las_real(pop: &Pop<RealPoly>, r: usize) -> Result<Relaxation<Exponent>> {
    dense(pop, r, None, true)
}

/// Complex moment relaxation (LAS) of order `r`.
pub fn assemble_las_complex(
    pop: &Pop<ComplexPoly>,
    r: usize,
) -> Result<Relaxation<ComplexMomentIndex>> {
    dense(pop, r, None, true)
}

/// Shift-strengthened real relaxation with block order `s ≤ r`. The
/// standalone moment block is omitted when `s = r`, since it is the leading
/// principal block of every shift block.
pub fn assemble_slas_real(
    pop: &Pop<RealPoly>,
    r: usize,
    s: usize,
) -> Result<Relaxation<Exponent>> {
    if s > r {
        return Err(Error::InvalidParameter(format!(
            "shift order s = {s} exceeds relaxation order r = {r} for a real problem"
        )));
    }
    dense(pop, r, Some(s), s < r)
}

/// Shift-strengthened complex relaxation with normal order `s`.
pub fn assemble_slas_complex(
    pop: &Pop<ComplexPoly>,
    r: usize,
    s: usize,
) -> Result<Relaxation<ComplexMomentIndex>> {
    dense(pop, r, Some(s), true)
}

/// Degree bound check used by tests: largest total degree of a real catalog.
pub fn real_catalog_degree(rel: &Relaxation<Exponent>) -> u32 {
    rel.catalog.iter().map(Exponent::degree).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Constraint;

    fn e(v: &[u32]) -> Exponent {
        Exponent::new(v.to_vec())
    }

    fn sq(n: usize, i: usize) -> RealPoly {
        &RealPoly::var(n, i) * &RealPoly::var(n, i)
    }

    #[test]
    fn las_blocks_and_normalization() {
        let pop = Pop::new(sq(1, 0), vec![]);
        let rel = assemble_las_real(&pop, 1).unwrap();
        assert_eq!(rel.block_dims(), vec![2]);
        assert_eq!(rel.equalities[0].lhs, LinComb::single(e(&[0]), 1.0));
        assert_eq!(rel.equalities[0].rhs, 1.0);
        assert_eq!(rel.catalog, vec![e(&[0]), e(&[1]), e(&[2])]);
        assert!(rel.is_catalog_closed());
    }

    #[test]
    fn order_too_low() {
        let pop = Pop::new(sq(1, 0), vec![]);
        assert!(matches!(assemble_las_real(&pop, 0), Err(Error::OrderTooLow { .. })));
        assert!(assemble_slas_real(&pop, 1, 2).is_err());
    }

    #[test]
    fn binary_equalities_become_rows() {
        let n = 2;
        let one = RealPoly::constant(n, 1.0);
        let f = &RealPoly::var(n, 0) * &RealPoly::var(n, 1);
        let cons = (0..n).map(|i| Constraint::eq(&sq(n, i) - &one)).collect();
        let rel = assemble_las_real(&Pop::new(f, cons), 1).unwrap();
        // one moment block, y0 = 1, and y_{2e_i} - y_0 = 0 per variable
        assert_eq!(rel.block_dims(), vec![3]);
        assert_eq!(rel.equalities.len(), 3);
    }

    #[test]
    fn slas_real_catalog_and_blocks() {
        let pop = Pop::new(sq(1, 0), vec![]);
        let rel = assemble_slas_real(&pop, 1, 1).unwrap();
        assert_eq!(rel.block_dims(), vec![4]);
        assert_eq!(real_catalog_degree(&rel), 4);
        assert_eq!(rel.catalog.len(), 5);

        let pop2 = Pop::new(sq(2, 0), vec![]);
        let rel2 = assemble_slas_real(&pop2, 2, 1).unwrap();
        assert_eq!(rel2.block_dims(), vec![6, 6, 6]);
    }

    #[test]
    fn shift_top_left_is_moment_matrix() {
        let pop = Pop::new(sq(2, 0), vec![]);
        let rel = assemble_slas_real(&pop, 2, 2).unwrap();
        let m = super::super::real_moment_matrix(2, 2);
        for b in &rel.blocks {
            for i in 0..m.dim() {
                for j in 0..m.dim() {
                    assert_eq!(b.entry(i, j), m.entry(i, j));
                }
            }
        }
    }

    #[test]
    fn complex_las_and_slas() {
        let f = ComplexPoly::abs_sq(1, 0);
        let g = &ComplexPoly::constant(1, 1.0) - &ComplexPoly::abs_sq(1, 0);
        let pop = Pop::new(f.clone(), vec![Constraint::ge(g.clone())]);
        let rel = assemble_las_complex(&pop, 1).unwrap();
        assert_eq!(rel.block_dims(), vec![2, 1]);
        // y00, y10, y11
        assert_eq!(rel.catalog.len(), 3);
        let rel = assemble_slas_complex(&pop, 1, 1).unwrap();
        assert_eq!(rel.block_dims(), vec![2, 1, 4]);
        assert!(rel.is_catalog_closed());

        let pop = Pop::new(f, vec![Constraint::eq(g)]);
        let rel = assemble_las_complex(&pop, 1).unwrap();
        // y00 - y11 = 0 once; conjugate duplicates removed
        assert_eq!(rel.equalities.len(), 2);
    }

    #[test]
    fn complex_rejects_non_self_conjugate() {
        let pop = Pop::new(ComplexPoly::var(1, 0), vec![]);
        assert!(assemble_las_complex(&pop, 1).is_err());
    }
}

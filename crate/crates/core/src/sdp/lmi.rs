use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sparse symmetric matrix stored by its upper triangle (`i ≤ j`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SymSparse {
    entries: BTreeMap<(usize, usize), f64>,
}

impl SymSparse {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `v` to entry `(i, j)` (and implicitly `(j, i)`).
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let key = if i <= j { (i, j) } else { (j, i) };
        let e = self.entries.entry(key).or_insert(0.0);
        *e += v;
        if *e == 0.0 {
            self.entries.remove(&key);
        }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        let key = if i <= j { (i, j) } else { (j, i) };
        self.entries.get(&key).copied().unwrap_or(0.0)
    }

    /// Upper-triangular entries in row-major order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries.iter().map(|(&(i, j), &v)| (i, j, v))
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::new();
        for (i, j, v) in self.iter() {
            out.add(i, j, s * v);
        }
        out
    }

    /// `self += s · other`.
    pub fn axpy(&mut self, s: f64, other: &SymSparse) {
        for (i, j, v) in other.iter() {
            self.add(i, j, s * v);
        }
    }

    pub fn to_dense(&self, dim: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(dim, dim);
        self.add_to_dense(&mut m, 1.0);
        m
    }

    pub fn add_to_dense(&self, m: &mut DMatrix<f64>, s: f64) {
        for (i, j, v) in self.iter() {
            m[(i, j)] += s * v;
            if i != j {
                m[(j, i)] += s * v;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.values().fold(0.0, |a, v| a.max(v.abs()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Dense,
    /// Only diagonal entries are allowed.
    Diagonal,
}

/// One block `F_0 + Σ x_k F_k ⪰ 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiBlock {
    pub dim: usize,
    pub kind: BlockKind,
    pub f0: SymSparse,
    /// Nonzero coefficient matrices keyed by variable index.
    pub coeffs: BTreeMap<usize, SymSparse>,
    /// Provenance of the block (which symbolic block, clique, class).
    pub label: String,
}

impl LmiBlock {
    pub fn new(dim: usize, kind: BlockKind, label: impl Into<String>) -> Self {
        Self { dim, kind, f0: SymSparse::new(), coeffs: BTreeMap::new(), label: label.into() }
    }

    /// Adds `v` at `(i, j)` of `F_0` (`var = None`) or `F_var`.
    pub fn add(&mut self, var: Option<usize>, i: usize, j: usize, v: f64) {
        match var {
            None => self.f0.add(i, j, v),
            Some(k) => {
                let m = self.coeffs.entry(k).or_default();
                m.add(i, j, v);
                if m.is_zero() {
                    self.coeffs.remove(&k);
                }
            }
        }
    }

    /// Dense value of the affine matrix at `x`.
    pub fn instantiate(&self, x: &[f64]) -> DMatrix<f64> {
        let mut m = self.f0.to_dense(self.dim);
        for (&k, f) in &self.coeffs {
            f.add_to_dense(&mut m, x[k]);
        }
        m
    }

    fn same_data(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.kind == other.kind
            && self.f0 == other.f0
            && self.coeffs == other.coeffs
    }
}

/// `Σ coeffs · x = rhs`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearEquality {
    pub coeffs: Vec<(usize, f64)>,
    pub rhs: f64,
}

impl LinearEquality {
    pub fn residual(&self, x: &[f64]) -> f64 {
        self.coeffs.iter().map(|&(k, a)| a * x[k]).sum::<f64>() - self.rhs
    }
}

/// Minimize `b · x` subject to `F_0^j + Σ x_k F_k^j ⪰ 0` for every block `j`
/// and `A x = c`.
#[derive(Clone, Debug, PartialEq)]
pub struct LmiProblem {
    pub m: usize,
    pub b: Vec<f64>,
    pub blocks: Vec<LmiBlock>,
    pub equalities: Vec<LinearEquality>,
}

impl LmiProblem {
    pub fn new(b: Vec<f64>) -> Self {
        Self { m: b.len(), b, blocks: Vec::new(), equalities: Vec::new() }
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim).collect()
    }

    pub fn total_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.dim).sum()
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.b.iter().zip(x).map(|(b, x)| b * x).sum()
    }

    /// Equality with the labels ignored.
    pub fn structurally_equal(&self, other: &Self) -> bool {
        self.m == other.m
            && self.b == other.b
            && self.equalities == other.equalities
            && self.blocks.len() == other.blocks.len()
            && self.blocks.iter().zip(&other.blocks).all(|(a, b)| a.same_data(b))
    }

    /// Checks indices, diagonal-block shape and dimensions.
    pub fn validate(&self) -> Result<()> {
        if self.b.len() != self.m {
            return Err(Error::Dimension { expected: self.m, got: self.b.len() });
        }
        for blk in &self.blocks {
            let mats = std::iter::once(&blk.f0).chain(blk.coeffs.values());
            for f in mats {
                for (i, j, _) in f.iter() {
                    if j >= blk.dim {
                        return Err(Error::Dimension { expected: blk.dim, got: j + 1 });
                    }
                    if blk.kind == BlockKind::Diagonal && i != j {
                        return Err(Error::InvalidParameter(format!(
                            "off-diagonal entry ({i}, {j}) in diagonal block {}",
                            blk.label
                        )));
                    }
                }
            }
            if let Some((&k, _)) = blk.coeffs.iter().next_back() {
                if k >= self.m {
                    return Err(Error::Dimension { expected: self.m, got: k + 1 });
                }
            }
        }
        for e in &self.equalities {
            if let Some(&(k, _)) = e.coeffs.iter().find(|(k, _)| *k >= self.m) {
                return Err(Error::Dimension { expected: self.m, got: k + 1 });
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_sparse_folds_lower_triangle() {
        let mut s = SymSparse::new();
        s.add(1, 0, 2.0);
        s.add(0, 1, 1.0);
        assert_eq!(s.get(0, 1), 3.0);
        assert_eq!(s.nnz(), 1);
        s.add(0, 1, -3.0);
        assert!(s.is_zero());
    }

    #[test]
    fn instantiate_block() {
        let mut b = LmiBlock::new(2, BlockKind::Dense, "t");
        b.add(None, 0, 1, 1.0);
        b.add(Some(0), 0, 0, 1.0);
        b.add(Some(0), 1, 1, 1.0);
        let m = b.instantiate(&[3.0]);
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[3.0, 1.0, 1.0, 3.0]));
        let mut p = LmiProblem::new(vec![1.0]);
        p.blocks.push(b.clone());
        p.validate().unwrap();
        let mut q = p.clone();
        q.blocks[0].label = "other".into();
        assert!(p.structurally_equal(&q));
        let mut bad = LmiBlock::new(2, BlockKind::Diagonal, "d");
        bad.add(None, 0, 1, 1.0);
        p.blocks.push(bad);
        assert!(p.validate().is_err());
    }
}

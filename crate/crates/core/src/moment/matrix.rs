use std::fmt;

use nalgebra::DMatrix;

use super::{LinComb, MomentKey};
use crate::poly::Exponent;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SymmetryKind {
    Symmetric,
    Hermitian,
}

/// Provenance of a PSD block.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockRole {
    Moment { order: usize },
    Localizing { constraint: usize, order: usize },
    /// Shift-operator block for variable `var` at order `order`.
    Shift { var: usize, order: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockTag {
    pub role: BlockRole,
    pub clique: Option<usize>,
    /// Sign-symmetry class index after partitioning.
    pub class: Option<usize>,
}

impl BlockTag {
    pub fn new(role: BlockRole) -> Self {
        Self { role, clique: None, class: None }
    }

    pub fn in_clique(mut self, clique: Option<usize>) -> Self {
        self.clique = clique;
        self
    }
}

impl fmt::Display for BlockTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.role {
            BlockRole::Moment { order } => write!(f, "moment[r={order}]")?,
            BlockRole::Localizing { constraint, order } => {
                write!(f, "localizing[g{constraint},r={order}]")?
            }
            BlockRole::Shift { var, order } => write!(f, "shift[x{var},s={order}]")?,
        }
        if let Some(c) = self.clique {
            write!(f, "@clique{c}")?;
        }
        if let Some(c) = self.class {
            write!(f, "#class{c}")?;
        }
        Ok(())
    }
}

/// Square matrix of moment linear combinations, stored densely (row-major).
///
/// `labels[i]` is the monomial attached to row/column `i`; sign-symmetry
/// partitioning groups rows by the parity class of their label.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicMatrix<K: MomentKey> {
    dim: usize,
    labels: Vec<Exponent>,
    entries: Vec<LinComb<K>>,
    kind: SymmetryKind,
    pub tag: BlockTag,
}

impl<K: MomentKey> SymbolicMatrix<K> {
    /// Builds the matrix from an entry generator over label pairs.
    pub fn from_fn(
        labels: Vec<Exponent>,
        tag: BlockTag,
        mut entry: impl FnMut(usize, usize) -> LinComb<K>,
    ) -> Self {
        let dim = labels.len();
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(entry(i, j));
            }
        }
        let kind = if K::COMPLEX { SymmetryKind::Hermitian } else { SymmetryKind::Symmetric };
        Self { dim, labels, entries, kind, tag }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn labels(&self) -> &[Exponent] {
        &self.labels
    }

    pub fn kind(&self) -> SymmetryKind {
        self.kind
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinComb<K> {
        &self.entries[i * self.dim + j]
    }

    /// Checks the declared symmetry entrywise.
    pub fn is_structurally_symmetric(&self) -> bool {
        (0..self.dim).all(|i| {
            (i..self.dim).all(|j| match self.kind {
                SymmetryKind::Symmetric => self.entry(i, j) == self.entry(j, i),
                SymmetryKind::Hermitian => self.entry(j, i) == &self.entry(i, j).conjugate(),
            })
        })
    }

    /// Principal submatrix on the given rows.
    pub fn principal(&self, rows: &[usize], tag: BlockTag) -> Self {
        let labels = rows.iter().map(|&i| self.labels[i].clone()).collect();
        Self::from_fn(labels, tag, |a, b| self.entry(rows[a], rows[b]).clone())
    }

    /// Every moment key referenced by an entry.
    pub fn keys(&self) -> impl Iterator<Item = &K> {
        self.entries.iter().flat_map(|e| e.keys())
    }

    /// Numeric instantiation against a moment assignment.
    pub fn instantiate(&self, moment: impl Fn(&K) -> K::Coeff) -> DMatrix<K::Coeff>
    where
        K::Coeff: nalgebra::Scalar,
    {
        DMatrix::from_fn(self.dim, self.dim, |i, j| self.entry(i, j).eval(&moment))
    }
}

use std::collections::HashMap;

use super::StructureMode;
use crate::error::Result;
use crate::moment::{
    assemble_las_complex, assemble_las_real, assemble_slas_complex, assemble_slas_real,
    ComplexMomentIndex, MomentKey, Relaxation, SymbolicMatrix,
};
use crate::poly::{ComplexPoly, Exponent, Polynomial, Pop, RealPoly};

/// The F2 space `U` of sign symmetries shared by the objective and all
/// constraints, given by a basis `s_1..s_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignSymmetryGroup {
    pub n: usize,
    pub basis: Vec<Vec<u8>>,
}

impl SignSymmetryGroup {
    pub fn trivial(n: usize) -> Self {
        Self { n, basis: Vec::new() }
    }

    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    /// `L(α) = (s_j · α mod 2)_j`.
    pub fn label(&self, alpha: &Exponent) -> Vec<u8> {
        self.basis
            .iter()
            .map(|s| {
                let dot: u32 = s.iter().zip(alpha.entries()).map(|(&a, &b)| a as u32 * b).sum();
                (dot % 2) as u8
            })
            .collect()
    }

    pub fn is_invariant(&self, alpha: &Exponent) -> bool {
        self.label(alpha).iter().all(|&b| b == 0)
    }

    /// All `2^k` elements of `U`.
    pub fn elements(&self) -> Vec<Vec<u8>> {
        let mut out = vec![vec![0u8; self.n]];
        for s in &self.basis {
            let more: Vec<Vec<u8>> = out
                .iter()
                .map(|v| v.iter().zip(s).map(|(a, b)| a ^ b).collect())
                .collect();
            out.extend(more);
        }
        out
    }
}

/// Null space over F2 of the support parities of `f` and every constraint.
pub fn sign_symmetries<P: Polynomial>(pop: &Pop<P>) -> SignSymmetryGroup {
    let n = pop.n;
    let mut rows: Vec<Vec<u8>> = pop.objective.support_parities();
    for c in &pop.constraints {
        rows.extend(c.poly.support_parities());
    }
    // reduced row echelon form over F2
    let mut pivots: Vec<usize> = Vec::new();
    let mut rank = 0;
    for col in 0..n {
        let Some(p) = (rank..rows.len()).find(|&i| rows[i][col] == 1) else {
            continue;
        };
        rows.swap(rank, p);
        for i in 0..rows.len() {
            if i != rank && rows[i][col] == 1 {
                let pivot_row = rows[rank].clone();
                for (a, b) in rows[i].iter_mut().zip(&pivot_row) {
                    *a ^= b;
                }
            }
        }
        pivots.push(col);
        rank += 1;
    }
    let mut basis = Vec::new();
    for free in (0..n).filter(|c| !pivots.contains(c)) {
        let mut v = vec![0u8; n];
        v[free] = 1;
        for (r, &pc) in pivots.iter().enumerate() {
            v[pc] = rows[r][free];
        }
        basis.push(v);
    }
    SignSymmetryGroup { n, basis }
}

/// Groups label positions by their class `L(α)`, in order of first occurrence.
pub fn partition_labels(labels: &[Exponent], group: &SignSymmetryGroup) -> Vec<Vec<usize>> {
    let mut index: HashMap<Vec<u8>, usize> = HashMap::new();
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    for (i, a) in labels.iter().enumerate() {
        let l = group.label(a);
        let k = *index.entry(l).or_insert_with(|| {
            blocks.push(Vec::new());
            blocks.len() - 1
        });
        blocks[k].push(i);
    }
    blocks
}

/// Partition of a symbolic block's rows. Shift blocks carry `α + e_i` as the
/// label of their second half, so no extra context is needed.
pub fn partition_matrix<K: MomentKey>(
    m: &SymbolicMatrix<K>,
    group: &SignSymmetryGroup,
) -> Vec<Vec<usize>> {
    partition_labels(m.labels(), group)
}

/// Replaces every block by its class sub-blocks, drops equality rows on
/// non-invariant moments and prunes the catalog.
pub fn apply_sign_symmetry<K: MomentKey>(
    rel: Relaxation<K>,
    group: &SignSymmetryGroup,
) -> Relaxation<K> {
    let Relaxation { n, objective, blocks, equalities, mut meta, .. } = rel;
    meta.structure = match meta.structure {
        StructureMode::Cs | StructureMode::CsSign => StructureMode::CsSign,
        _ => StructureMode::Sign,
    };
    let mut new_blocks = Vec::new();
    for b in blocks {
        let parts = partition_matrix(&b, group);
        if parts.len() == 1 {
            new_blocks.push(b);
            continue;
        }
        for (c, rows) in parts.iter().enumerate() {
            let mut tag = b.tag.clone();
            tag.class = Some(c);
            new_blocks.push(b.principal(rows, tag));
        }
    }
    let equalities = equalities
        .into_iter()
        .filter(|e| e.lhs.keys().all(|k| group.is_invariant(&k.parity_exponent())))
        .collect();
    let mut out = Relaxation {
        n,
        catalog: Vec::new(),
        objective,
        blocks: new_blocks,
        equalities,
        meta,
    };
    out.rebuild_catalog();
    out
}

/// Sign-symmetry reduced real relaxation (LAS when `s` is `None`).
pub fn assemble_ss_real(
    pop: &Pop<RealPoly>,
    r: usize,
    s: Option<usize>,
) -> Result<Relaxation<Exponent>> {
    let rel = match s {
        None => assemble_las_real(pop, r)?,
        Some(s) => assemble_slas_real(pop, r, s)?,
    };
    Ok(apply_sign_symmetry(rel, &sign_symmetries(pop)))
}

/// Sign-symmetry reduced complex relaxation (LAS when `s` is `None`).
pub fn assemble_ss_complex(
    pop: &Pop<ComplexPoly>,
    r: usize,
    s: Option<usize>,
) -> Result<Relaxation<ComplexMomentIndex>> {
    let rel = match s {
        None => assemble_las_complex(pop, r)?,
        Some(s) => assemble_slas_complex(pop, r, s)?,
    };
    Ok(apply_sign_symmetry(rel, &sign_symmetries(pop)))
}

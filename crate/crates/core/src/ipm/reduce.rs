//! Null-space elimination of the linear equalities `A x = c`.

use std::collections::BTreeMap;

use crate::sdp::{LmiBlock, LmiProblem, SymSparse};

/// `x = x0 + N z`: each original variable is either free (`z` index) or an
/// affine function of the free variables.
#[derive(Clone, Debug)]
pub(crate) struct Elimination {
    /// Per original variable: constant and sparse coefficients on `z`.
    pub exprs: Vec<(f64, Vec<(usize, f64)>)>,
    /// Constant part of the objective.
    pub offset: f64,
}

impl Elimination {
    pub fn expand(&self, z: &[f64]) -> Vec<f64> {
        self.exprs
            .iter()
            .map(|(c, terms)| c + terms.iter().map(|&(t, a)| a * z[t]).sum::<f64>())
            .collect()
    }
}

/// Outcome of the elimination.
pub(crate) enum Reduced {
    Ok(LmiProblem, Elimination),
    /// Equalities cannot be satisfied.
    Inconsistent,
    /// A direction along which the objective decreases without bound.
    Unbounded,
}

type Expr = (f64, BTreeMap<usize, f64>);

/// Row `p` of a block as `(column, variable + 1 or 0 for F0) → value`.
type RowMap = BTreeMap<(usize, usize), f64>;

fn rows_of(blk: &LmiBlock) -> Vec<RowMap> {
    let mut rows = vec![RowMap::new(); blk.dim];
    let mut put = |i: usize, j: usize, var: usize, v: f64| {
        rows[i].insert((j, var), v);
        rows[j].insert((i, var), v);
    };
    for (i, j, v) in blk.f0.iter() {
        put(i, j, 0, v);
    }
    for (&k, f) in &blk.coeffs {
        for (i, j, v) in f.iter() {
            put(i, j, k + 1, v);
        }
    }
    rows
}

fn same_row(a: &RowMap, b: &RowMap) -> bool {
    let scale = a.values().chain(b.values()).fold(1.0f64, |m, v| m.max(v.abs()));
    a.len() == b.len()
        && a.iter().all(|(key, &v)| b.get(key).is_some_and(|&w| (v - w).abs() <= 1e-12 * scale))
}

/// Drops identically zero rows and rows that duplicate an earlier row. A
/// symmetric matrix is PSD exactly when the remaining principal submatrix
/// is, and without the dropped rows the block can have interior points.
fn compress(blk: LmiBlock) -> LmiBlock {
    let rows = rows_of(&blk);
    let mut keep: Vec<usize> = Vec::with_capacity(blk.dim);
    for p in 0..blk.dim {
        if rows[p].is_empty() {
            continue;
        }
        if keep.iter().any(|&q| same_row(&rows[q], &rows[p])) {
            continue;
        }
        keep.push(p);
    }
    if keep.len() == blk.dim {
        return blk;
    }
    let mut index = vec![usize::MAX; blk.dim];
    for (new, &old) in keep.iter().enumerate() {
        index[old] = new;
    }
    let remap = |f: &SymSparse| {
        let mut out = SymSparse::new();
        for (i, j, v) in f.iter() {
            if index[i] != usize::MAX && index[j] != usize::MAX {
                out.add(index[i], index[j], v);
            }
        }
        out
    };
    let mut out = LmiBlock::new(keep.len(), blk.kind, blk.label.clone());
    out.f0 = remap(&blk.f0);
    out.coeffs = blk.coeffs.iter().map(|(&k, f)| (k, remap(f))).filter(|(_, f)| !f.is_zero()).collect();
    out
}

/// Gauss–Jordan elimination on the sparse rows; the pivot of each row is the
/// highest-index variable whose coefficient is within a factor 10 of the
/// row's largest.
pub(crate) fn eliminate(problem: &LmiProblem) -> Reduced {
    let m = problem.m;
    let mut dep: BTreeMap<usize, Expr> = BTreeMap::new();
    for eq in &problem.equalities {
        let mut row: BTreeMap<usize, f64> = BTreeMap::new();
        let mut rhs = eq.rhs;
        let mut scale = eq.rhs.abs().max(1.0);
        for &(k, a) in &eq.coeffs {
            scale = scale.max(a.abs());
            match dep.get(&k) {
                Some((c, terms)) => {
                    rhs -= a * c;
                    for (&j, &cj) in terms {
                        *row.entry(j).or_insert(0.0) += a * cj;
                    }
                }
                None => *row.entry(k).or_insert(0.0) += a,
            }
        }
        let max = row.values().fold(0.0f64, |a, v| a.max(v.abs()));
        row.retain(|_, v| v.abs() > 1e-12 * scale);
        if row.is_empty() {
            if rhs.abs() > 1e-8 * scale {
                return Reduced::Inconsistent;
            }
            continue;
        }
        let p = *row
            .iter()
            .filter(|(_, v)| v.abs() >= 0.1 * max)
            .map(|(k, _)| k)
            .next_back()
            .expect("nonempty row");
        let ap = row[&p];
        let expr_p: Expr = (
            rhs / ap,
            row.iter().filter(|(&k, _)| k != p).map(|(&k, &v)| (k, -v / ap)).collect(),
        );
        for (c, terms) in dep.values_mut() {
            if let Some(cp) = terms.remove(&p) {
                *c += cp * expr_p.0;
                for (&j, &v) in &expr_p.1 {
                    let e = terms.entry(j).or_insert(0.0);
                    *e += cp * v;
                    if *e == 0.0 {
                        terms.remove(&j);
                    }
                }
            }
        }
        dep.insert(p, expr_p);
    }

    let free: Vec<usize> = (0..m).filter(|k| !dep.contains_key(k)).collect();
    let mut zindex = vec![usize::MAX; m];
    for (t, &k) in free.iter().enumerate() {
        zindex[k] = t;
    }
    let exprs: Vec<(f64, Vec<(usize, f64)>)> = (0..m)
        .map(|k| match dep.get(&k) {
            Some((c, terms)) => (*c, terms.iter().map(|(&j, &v)| (zindex[j], v)).collect()),
            None => (0.0, vec![(zindex[k], 1.0)]),
        })
        .collect();

    let mut b = vec![0.0; free.len()];
    let mut offset = 0.0;
    for (k, (c, terms)) in exprs.iter().enumerate() {
        offset += problem.b[k] * c;
        for &(t, v) in terms {
            b[t] += problem.b[k] * v;
        }
    }

    let mut blocks = Vec::with_capacity(problem.blocks.len());
    let mut used = vec![false; free.len()];
    for blk in &problem.blocks {
        let mut out = LmiBlock::new(blk.dim, blk.kind, blk.label.clone());
        out.f0 = blk.f0.clone();
        let mut coeffs: BTreeMap<usize, SymSparse> = BTreeMap::new();
        for (&k, f) in &blk.coeffs {
            let (c, terms) = &exprs[k];
            out.f0.axpy(*c, f);
            for &(t, v) in terms {
                coeffs.entry(t).or_default().axpy(v, f);
            }
        }
        coeffs.retain(|_, f| !f.is_zero());
        out.coeffs = coeffs;
        let out = compress(out);
        for &t in out.coeffs.keys() {
            used[t] = true;
        }
        blocks.push(out);
    }

    // free variables that no block constrains
    let bscale = b.iter().fold(1.0f64, |a, v| a.max(v.abs()));
    if used.iter().zip(&b).any(|(&u, &c)| !u && c.abs() > 1e-12 * bscale) {
        return Reduced::Unbounded;
    }
    let kept: Vec<usize> = (0..free.len()).filter(|&t| used[t]).collect();
    let mut renumber = vec![usize::MAX; free.len()];
    for (s, &t) in kept.iter().enumerate() {
        renumber[t] = s;
    }
    for blk in &mut blocks {
        blk.coeffs = std::mem::take(&mut blk.coeffs)
            .into_iter()
            .map(|(t, f)| (renumber[t], f))
            .collect();
    }
    let exprs = exprs
        .into_iter()
        .map(|(c, terms)| {
            (c, terms.into_iter().filter(|&(t, _)| used[t]).map(|(t, v)| (renumber[t], v)).collect())
        })
        .collect();
    let reduced = LmiProblem {
        m: kept.len(),
        b: kept.iter().map(|&t| b[t]).collect(),
        blocks,
        equalities: Vec::new(),
    };
    Reduced::Ok(reduced, Elimination { exprs, offset })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::{BlockKind, LinearEquality};

    #[test]
    fn eliminates_and_expands() {
        // min x0 + x1 + x2 s.t. diag(x0, x1, x2) ⪰ 0, x0 + x1 = 1, x1 - x2 = 0
        let mut blk = LmiBlock::new(3, BlockKind::Dense, "d");
        for k in 0..3 {
            blk.add(Some(k), k, k, 1.0);
        }
        let mut p = LmiProblem::new(vec![1.0, 1.0, 1.0]);
        p.blocks.push(blk);
        p.equalities.push(LinearEquality { coeffs: vec![(0, 1.0), (1, 1.0)], rhs: 1.0 });
        p.equalities.push(LinearEquality { coeffs: vec![(1, 1.0), (2, -1.0)], rhs: 0.0 });
        let Reduced::Ok(r, e) = eliminate(&p) else { panic!() };
        assert_eq!(r.m, 1);
        let x = e.expand(&[0.25]);
        for eq in &p.equalities {
            assert!(eq.residual(&x).abs() < 1e-15);
        }
        let direct: f64 = x.iter().sum();
        assert!((r.objective(&[0.25]) + e.offset - direct).abs() < 1e-15);
    }

    #[test]
    fn detects_inconsistency_and_unboundedness() {
        let mut p = LmiProblem::new(vec![1.0, 0.0]);
        let mut blk = LmiBlock::new(1, BlockKind::Dense, "d");
        blk.add(Some(1), 0, 0, 1.0);
        p.blocks.push(blk);
        assert!(matches!(eliminate(&p), Reduced::Unbounded));
        p.b = vec![0.0, 1.0];
        assert!(matches!(eliminate(&p), Reduced::Ok(..)));
        p.equalities.push(LinearEquality { coeffs: vec![(0, 1.0)], rhs: 1.0 });
        p.equalities.push(LinearEquality { coeffs: vec![(0, 2.0)], rhs: 1.0 });
        assert!(matches!(eliminate(&p), Reduced::Inconsistent));
    }
}

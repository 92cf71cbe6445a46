use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{BlockKind, LinearEquality, LmiBlock, LmiProblem};
use crate::error::{Error, Result};
use crate::moment::{Coeff, LinComb, MomentKey, Relaxation};

/// Real or imaginary part of a catalog moment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
}

/// What a real unknown became after elimination.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Slot {
    /// Pinned by `y_0 = 1` or a single-variable equality.
    Fixed(f64),
    /// Decision variable `x_k`.
    Var(usize),
}

/// Maps catalog moments to LMI decision variables.
#[derive(Clone, Debug, PartialEq)]
pub struct VariableMap {
    /// `(catalog index, part)` of each real unknown, in catalog order.
    pub unknowns: Vec<(usize, Part)>,
    pub slots: Vec<Slot>,
    /// Per catalog entry: real-part unknown and optional imaginary-part unknown.
    pub key_slots: Vec<(usize, Option<usize>)>,
    /// Constant added to `b · x` to obtain the relaxation objective.
    pub offset: f64,
    pub m: usize,
}

impl VariableMap {
    fn unknown_value(&self, u: usize, x: &[f64]) -> f64 {
        match self.slots[u] {
            Slot::Fixed(v) => v,
            Slot::Var(k) => x[k],
        }
    }

    /// `(re, im)` of catalog moment `idx` at the point `x`.
    pub fn moment(&self, idx: usize, x: &[f64]) -> (f64, f64) {
        let (re, im) = self.key_slots[idx];
        (self.unknown_value(re, x), im.map_or(0.0, |u| self.unknown_value(u, x)))
    }

    /// Number of eliminated unknowns.
    pub fn eliminated(&self) -> usize {
        self.slots.iter().filter(|s| matches!(s, Slot::Fixed(_))).count()
    }

    /// The decision vector encoding a moment assignment given per catalog entry.
    pub fn point_from_moments(&self, moment: impl Fn(usize) -> (f64, f64)) -> Vec<f64> {
        let mut x = vec![0.0; self.m];
        for (u, &(idx, part)) in self.unknowns.iter().enumerate() {
            if let Slot::Var(k) = self.slots[u] {
                let (re, im) = moment(idx);
                x[k] = if part == Part::Re { re } else { im };
            }
        }
        x
    }

    /// Relaxation objective from the LMI objective.
    pub fn bound(&self, lmi_objective: f64) -> f64 {
        lmi_objective + self.offset
    }
}

/// `[[Re H, −Im H], [Im H, Re H]]`, the real form used for Hermitian blocks.
/// Its spectrum is that of `H` with every eigenvalue doubled.
pub fn realify_hermitian(h: &DMatrix<Complex64>) -> DMatrix<f64> {
    let d = h.nrows();
    DMatrix::from_fn(2 * d, 2 * d, |i, j| {
        let v = h[(i % d, j % d)];
        match (i < d, j < d) {
            (true, true) | (false, false) => v.re,
            (true, false) => -v.im,
            (false, true) => v.im,
        }
    })
}

/// Moment values of a relaxation at an LMI point, per (oriented) key.
pub fn moment_lookup<'a, K: MomentKey>(
    rel: &'a Relaxation<K>,
    map: &'a VariableMap,
    x: &'a [f64],
) -> impl Fn(&K) -> K::Coeff + 'a {
    move |k: &K| {
        let Some(idx) = rel.catalog_index(k) else {
            return K::Coeff::default();
        };
        let (re, im) = map.moment(idx, x);
        k.orient(K::Coeff::from_parts(re, im))
    }
}

/// Sparse real combination `Σ c_u u` over unknowns.
type Row = BTreeMap<usize, f64>;

fn add(row: &mut Row, u: usize, c: f64) {
    if c != 0.0 {
        *row.entry(u).or_insert(0.0) += c;
    }
}

/// Real and imaginary parts of a linear combination as rows over unknowns.
fn split<K: MomentKey>(rel: &Relaxation<K>, key_slots: &[(usize, Option<usize>)], l: &LinComb<K>) -> (Row, Row) {
    let mut re = Row::new();
    let mut im = Row::new();
    for (k, c) in l.terms() {
        let idx = rel.catalog_index(k).expect("catalog-closed relaxation");
        let (ur, ui) = key_slots[idx];
        // y = a + i·s·b with s = −1 for conjugated keys
        add(&mut re, ur, c.re());
        add(&mut im, ur, c.im());
        if let Some(ui) = ui {
            let s = if k.is_conjugated() { -1.0 } else { 1.0 };
            add(&mut re, ui, -c.im() * s);
            add(&mut im, ui, c.re() * s);
        }
    }
    (re, im)
}

/// Substitutes fixed unknowns: returns (constant, free part).
fn reduce(row: &Row, fixed: &[Option<f64>]) -> (f64, Row) {
    let mut constant = 0.0;
    let mut free = Row::new();
    for (&u, &c) in row {
        match fixed[u] {
            Some(v) => constant += c * v,
            None => add(&mut free, u, c),
        }
    }
    free.retain(|_, c| *c != 0.0);
    (constant, free)
}

fn scale_of(row: &Row, rhs: f64) -> f64 {
    row.values().fold(rhs.abs().max(1.0), |a, c| a.max(c.abs()))
}

/// Converts a relaxation into a real LMI problem. Hermitian blocks of size
/// `d` become real blocks `[[Re H, −Im H], [Im H, Re H]]` of size `2d`;
/// `y_0 = 1` and every equality that pins a single unknown are substituted
/// away; the remaining equalities become `A x = c`.
pub fn realize<K: MomentKey>(rel: &Relaxation<K>) -> Result<(LmiProblem, VariableMap)> {
    let mut unknowns = Vec::new();
    let mut key_slots = Vec::with_capacity(rel.catalog.len());
    for (idx, k) in rel.catalog.iter().enumerate() {
        let re = unknowns.len();
        unknowns.push((idx, Part::Re));
        let im = if k.has_imaginary() {
            unknowns.push((idx, Part::Im));
            Some(unknowns.len() - 1)
        } else {
            None
        };
        key_slots.push((re, im));
    }

    let mut rows: Vec<(Row, f64)> = Vec::new();
    for e in &rel.equalities {
        let (re, im) = split(rel, &key_slots, &e.lhs);
        rows.push((re, e.rhs.re()));
        if K::COMPLEX {
            rows.push((im, e.rhs.im()));
        }
    }

    let mut fixed: Vec<Option<f64>> = vec![None; unknowns.len()];
    let mut active: Vec<bool> = vec![true; rows.len()];
    loop {
        let mut changed = false;
        for (r, (row, rhs)) in rows.iter().enumerate() {
            if !active[r] {
                continue;
            }
            let (constant, free) = reduce(row, &fixed);
            let target = rhs - constant;
            match free.len() {
                0 => {
                    if target.abs() > 1e-9 * scale_of(row, *rhs) {
                        return Err(Error::InconsistentEqualities { residual: target.abs() });
                    }
                    active[r] = false;
                }
                1 => {
                    let (&u, &c) = free.iter().next().unwrap();
                    fixed[u] = Some(target / c);
                    active[r] = false;
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            break;
        }
    }

    let mut slots = Vec::with_capacity(unknowns.len());
    let mut m = 0;
    for f in &fixed {
        slots.push(match f {
            Some(v) => Slot::Fixed(*v),
            None => {
                m += 1;
                Slot::Var(m - 1)
            }
        });
    }
    let var_of = |u: usize| match slots[u] {
        Slot::Var(k) => Some(k),
        Slot::Fixed(_) => None,
    };

    // objective
    let (obj_re, obj_im) = split(rel, &key_slots, &rel.objective);
    let (im_const, im_free) = reduce(&obj_im, &fixed);
    let im_size = im_free.values().fold(im_const.abs(), |a, c| a.max(c.abs()));
    if im_size > 1e-9 * scale_of(&obj_re, 0.0) {
        return Err(Error::NonRealObjective(im_size));
    }
    let (offset, re_free) = reduce(&obj_re, &fixed);
    let mut b = vec![0.0; m];
    for (u, c) in re_free {
        b[var_of(u).unwrap()] += c;
    }

    let mut problem = LmiProblem::new(b);
    for blk in &rel.blocks {
        let d = blk.dim();
        let label = blk.tag.to_string();
        if K::COMPLEX {
            let mut out = LmiBlock::new(2 * d, BlockKind::Dense, label);
            let put = |out: &mut LmiBlock, i: usize, j: usize, row: &Row, s: f64| {
                for (&u, &c) in row {
                    match slots[u] {
                        Slot::Fixed(v) => out.add(None, i, j, s * c * v),
                        Slot::Var(k) => out.add(Some(k), i, j, s * c),
                    }
                }
            };
            for p in 0..d {
                for q in 0..d {
                    let (re, im) = split(rel, &key_slots, blk.entry(p, q));
                    if p <= q {
                        put(&mut out, p, q, &re, 1.0);
                        put(&mut out, d + p, d + q, &re, 1.0);
                    }
                    put(&mut out, p, d + q, &im, -1.0);
                }
            }
            problem.blocks.push(out);
        } else {
            let mut out = LmiBlock::new(d, BlockKind::Dense, label);
            for p in 0..d {
                for q in p..d {
                    let (re, _) = split(rel, &key_slots, blk.entry(p, q));
                    for (u, c) in re {
                        match slots[u] {
                            Slot::Fixed(v) => out.add(None, p, q, c * v),
                            Slot::Var(k) => out.add(Some(k), p, q, c),
                        }
                    }
                }
            }
            problem.blocks.push(out);
        }
    }

    for (r, (row, rhs)) in rows.iter().enumerate() {
        if !active[r] {
            continue;
        }
        let (constant, free) = reduce(row, &fixed);
        let coeffs: Vec<(usize, f64)> = free.iter().map(|(&u, &c)| (var_of(u).unwrap(), c)).collect();
        problem.equalities.push(LinearEquality { coeffs, rhs: rhs - constant });
    }
    dedup_equalities(&mut problem.equalities);

    let map = VariableMap { unknowns, slots, key_slots, offset, m };
    Ok((problem, map))
}

/// Drops exact duplicates (complex rows often reduce to the same real row).
fn dedup_equalities(eqs: &mut Vec<LinearEquality>) {
    let mut seen = std::collections::HashSet::new();
    eqs.retain(|e| {
        let key: Vec<(usize, u64)> = e
            .coeffs
            .iter()
            .map(|&(k, c)| (k, c.to_bits()))
            .chain(std::iter::once((usize::MAX, e.rhs.to_bits())))
            .collect();
        seen.insert(key)
    });
}

//! Infeasible primal–dual path following with Nesterov–Todd scaling and a
//! Mehrotra predictor–corrector.
//!
//! The LMI `min b·x s.t. F_0 + Σ x_k F_k ⪰ 0` is solved as the dual of the
//! standard-form pair
//!
//! ```text
//! (P) min C•X  s.t. A_k•X = c_k, X ⪰ 0
//! (D) max c·y  s.t. Σ y_k A_k + Z = C, Z ⪰ 0
//! ```
//!
//! with `A_k = −F_k`, `C = F_0`, `c = −b` and `y = x`.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use super::SolverConfig;
use crate::par;
use crate::sdp::{LmiProblem, Status};

#[derive(Clone, Copy, Debug)]
struct Entry {
    var: usize,
    a: usize,
    b: usize,
    v: f64,
}

struct BlockData {
    dim: usize,
    c: DMatrix<f64>,
    /// Entries of every `A_k` restricted to this block, sorted by variable.
    entries: Vec<Entry>,
}

pub(crate) struct Data {
    m: usize,
    c_vec: Vec<f64>,
    blocks: Vec<BlockData>,
    /// Per variable: `(block, start, end)` ranges into the block entry lists.
    var_blocks: Vec<Vec<(usize, usize, usize)>>,
}

impl Data {
    pub fn new(p: &LmiProblem) -> Self {
        let mut blocks = Vec::with_capacity(p.blocks.len());
        let mut var_blocks = vec![Vec::new(); p.m];
        for (j, blk) in p.blocks.iter().enumerate() {
            let mut entries = Vec::new();
            for (&k, f) in &blk.coeffs {
                let start = entries.len();
                for (a, b, v) in f.iter() {
                    entries.push(Entry { var: k, a, b, v: -v });
                }
                var_blocks[k].push((j, start, entries.len()));
            }
            blocks.push(BlockData { dim: blk.dim, c: blk.f0.to_dense(blk.dim), entries });
        }
        Self { m: p.m, c_vec: p.b.iter().map(|v| -v).collect(), blocks, var_blocks }
    }

    /// `(A_k • X)_k`.
    fn op(&self, xs: &[DMatrix<f64>]) -> Vec<f64> {
        let mut out = vec![0.0; self.m];
        for (blk, x) in self.blocks.iter().zip(xs) {
            for e in &blk.entries {
                let f = if e.a == e.b { 1.0 } else { 2.0 };
                out[e.var] += f * e.v * x[(e.a, e.b)];
            }
        }
        out
    }

    /// `Σ y_k A_k` per block.
    fn adj(&self, y: &[f64]) -> Vec<DMatrix<f64>> {
        self.blocks
            .iter()
            .map(|blk| {
                let mut m = DMatrix::zeros(blk.dim, blk.dim);
                for e in &blk.entries {
                    let v = y[e.var] * e.v;
                    m[(e.a, e.b)] += v;
                    if e.a != e.b {
                        m[(e.b, e.a)] += v;
                    }
                }
                m
            })
            .collect()
    }

    /// Schur complement `M_kl = A_k • (W A_l W)`, one row per task.
    fn schur(&self, ws: &[DMatrix<f64>], parallel: bool) -> DMatrix<f64> {
        let rows = par::map_indices(self.m, parallel, |k| self.schur_row(k, ws));
        let mut mat = DMatrix::zeros(self.m, self.m);
        for (k, row) in rows.into_iter().enumerate() {
            for (l, v) in row.into_iter().enumerate() {
                mat[(k, l)] = v;
            }
        }
        // exact symmetry regardless of rounding in the two triangles
        for k in 0..self.m {
            for l in 0..k {
                let v = 0.5 * (mat[(k, l)] + mat[(l, k)]);
                mat[(k, l)] = v;
                mat[(l, k)] = v;
            }
        }
        mat
    }

    fn schur_row(&self, k: usize, ws: &[DMatrix<f64>]) -> Vec<f64> {
        let mut row = vec![0.0; self.m];
        for &(j, start, end) in &self.var_blocks[k] {
            let blk = &self.blocks[j];
            let w = &ws[j];
            let d = blk.dim;
            let mut touched: Vec<usize> = Vec::new();
            for e in &blk.entries[start..end] {
                touched.push(e.a);
                touched.push(e.b);
            }
            touched.sort_unstable();
            touched.dedup();
            let pos = |r: usize| touched.binary_search(&r).unwrap();
            // P = A_k W restricted to its nonzero rows
            let mut p = DMatrix::zeros(touched.len(), d);
            for e in &blk.entries[start..end] {
                let ra = pos(e.a);
                for c in 0..d {
                    p[(ra, c)] += e.v * w[(e.b, c)];
                }
                if e.a != e.b {
                    let rb = pos(e.b);
                    for c in 0..d {
                        p[(rb, c)] += e.v * w[(e.a, c)];
                    }
                }
            }
            let wr = w.select_columns(touched.iter());
            let g = wr * p;
            for e in &blk.entries {
                let f = if e.a == e.b { 1.0 } else { 2.0 };
                row[e.var] += f * e.v * g[(e.a, e.b)];
            }
        }
        row
    }
}

struct Scaling {
    /// `W = T Tᵀ`, `Tᵀ Z T = T⁻¹ X T⁻ᵀ = diag(v)`.
    t: DMatrix<f64>,
    w: DMatrix<f64>,
    v: DVector<f64>,
}

fn nt_scaling(x: &DMatrix<f64>, z: &DMatrix<f64>) -> Option<Scaling> {
    let l = Cholesky::new(x.clone())?.l();
    let mut s = l.transpose() * z * &l;
    symmetrize(&mut s);
    let eig = SymmetricEigen::new(s);
    let lam = eig.eigenvalues.map(|v| v.max(f64::MIN_POSITIVE));
    let scale = lam.map(|v| v.powf(-0.25));
    let t = &l * &eig.eigenvectors * DMatrix::from_diagonal(&scale);
    let w = &t * t.transpose();
    Some(Scaling { t, w, v: lam.map(f64::sqrt) })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

fn inner(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.dot(b)
}

/// Largest `α` with `diag(v) + α D ⪰ 0` (infinite when `D ⪰ 0`).
fn max_step(v: &DVector<f64>, d: &DMatrix<f64>) -> f64 {
    let n = v.len();
    let mut s = DMatrix::from_fn(n, n, |i, j| d[(i, j)] / (v[i] * v[j]).sqrt());
    symmetrize(&mut s);
    let lmin = SymmetricEigen::new(s).eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    if lmin < 0.0 {
        -1.0 / lmin
    } else {
        f64::INFINITY
    }
}

struct Direction {
    dx: Vec<DMatrix<f64>>,
    dy: Vec<f64>,
    dz: Vec<DMatrix<f64>>,
    /// Scaled directions `T⁻¹ ΔX T⁻ᵀ` and `Tᵀ ΔZ T`.
    sx: Vec<DMatrix<f64>>,
    sz: Vec<DMatrix<f64>>,
}

pub(crate) struct Outcome {
    pub y: Vec<f64>,
    pub xs: Vec<DMatrix<f64>>,
    pub status: Status,
    pub iterations: usize,
}

struct Measures {
    pobj: f64,
    dobj: f64,
    gap: f64,
    pinf: f64,
    dinf: f64,
}

impl Measures {
    fn worst(&self) -> f64 {
        self.gap.max(self.pinf).max(self.dinf)
    }
}

pub(crate) fn run(data: &Data, cfg: &SolverConfig) -> Outcome {
    let m = data.m;
    let nb = data.blocks.len();
    let n_total: usize = data.blocks.iter().map(|b| b.dim).sum();
    let c_norm = data.c_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cmat_norm = data.blocks.iter().map(|b| b.c.norm_squared()).sum::<f64>().sqrt();

    // starting point
    let mut a_norms = vec![vec![0.0; nb]; m];
    for (k, ranges) in data.var_blocks.iter().enumerate() {
        for &(j, s, e) in ranges {
            let sq: f64 = data.blocks[j].entries[s..e]
                .iter()
                .map(|en| if en.a == en.b { en.v * en.v } else { 2.0 * en.v * en.v })
                .sum();
            a_norms[k][j] = sq.sqrt();
        }
    }
    let mut xs = Vec::with_capacity(nb);
    let mut zs = Vec::with_capacity(nb);
    for (j, blk) in data.blocks.iter().enumerate() {
        let n = blk.dim as f64;
        let mut xi: f64 = 10.0f64.max(n.sqrt());
        let mut eta: f64 = 10.0f64.max(n.sqrt()).max(blk.c.norm());
        for k in 0..m {
            xi = xi.max(n.sqrt() * (1.0 + data.c_vec[k].abs()) / (1.0 + a_norms[k][j]));
            eta = eta.max(a_norms[k][j]);
        }
        xs.push(DMatrix::identity(blk.dim, blk.dim) * xi);
        zs.push(DMatrix::identity(blk.dim, blk.dim) * eta);
    }
    let mut y = vec![0.0; m];

    let measure = |xs: &[DMatrix<f64>], y: &[f64], zs: &[DMatrix<f64>]| {
        let pobj: f64 = data.blocks.iter().zip(xs).map(|(b, x)| inner(&b.c, x)).sum();
        let dobj: f64 = data.c_vec.iter().zip(y).map(|(c, y)| c * y).sum();
        let ax = data.op(xs);
        let pinf = ax.iter().zip(&data.c_vec).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt()
            / (1.0 + c_norm);
        let ay = data.adj(y);
        let mut dsq = 0.0;
        for ((blk, z), a) in data.blocks.iter().zip(zs).zip(&ay) {
            dsq += (&blk.c - z - a).norm_squared();
        }
        let dinf = dsq.sqrt() / (1.0 + cmat_norm);
        let xz: f64 = xs.iter().zip(zs).map(|(x, z)| inner(x, z)).sum();
        let gap = xz.max((pobj - dobj).abs()) / (1.0 + 0.5 * (pobj.abs() + dobj.abs()));
        Measures { pobj, dobj, gap, pinf, dinf }
    };

    let mut best: Option<(f64, Vec<f64>, Vec<DMatrix<f64>>)> = None;
    let mut status = Status::MaxIterations;
    let mut iterations = 0;
    let mut stalls = 0;

    for iter in 0..=cfg.max_iter {
        iterations = iter;
        let ms = measure(&xs, &y, &zs);
        if best.as_ref().is_none_or(|(w, _, _)| ms.worst() < *w) {
            best = Some((ms.worst(), y.clone(), xs.clone()));
        }
        if ms.gap <= cfg.tol && ms.pinf <= cfg.feastol && ms.dinf <= cfg.feastol {
            status = Status::Optimal;
            best = Some((ms.worst(), y.clone(), xs.clone()));
            break;
        }
        if ms.pobj.abs().max(ms.dobj.abs()) > 1e12 * (1.0 + c_norm + cmat_norm) {
            status = Status::Infeasible;
            break;
        }
        if iter == cfg.max_iter {
            break;
        }

        let mut scal = Vec::with_capacity(nb);
        for (x, z) in xs.iter().zip(&zs) {
            match nt_scaling(x, z) {
                Some(s) => scal.push(s),
                None => {
                    if cfg.verbose {
                        eprintln!("scaling failed");
                    }
                    status = Status::NumericalFailure;
                    break;
                }
            }
        }
        if scal.len() < nb {
            break;
        }
        let ws: Vec<DMatrix<f64>> = scal.iter().map(|s| s.w.clone()).collect();
        let schur = data.schur(&ws, cfg.parallel);
        let chol = match Cholesky::new(schur.clone()) {
            Some(c) => c,
            None => {
                let maxd = schur.diagonal().iter().fold(0.0f64, |a, v| a.max(v.abs()));
                let reg = &schur + DMatrix::identity(m, m) * (1e-12 * maxd.max(1e-300));
                match Cholesky::new(reg) {
                    Some(c) => c,
                    None => {
                        if cfg.verbose {
                            eprintln!("schur complement not positive definite");
                        }
                        status = Status::NumericalFailure;
                        break;
                    }
                }
            }
        };

        // residuals
        let ax = data.op(&xs);
        let rp: Vec<f64> = data.c_vec.iter().zip(&ax).map(|(c, a)| c - a).collect();
        let ay = data.adj(&y);
        let rd: Vec<DMatrix<f64>> = data
            .blocks
            .iter()
            .zip(&zs)
            .zip(&ay)
            .map(|((b, z), a)| &b.c - z - a)
            .collect();
        let xz: f64 = xs.iter().zip(&zs).map(|(x, z)| inner(x, z)).sum();
        let mu = xz / n_total as f64;

        let solve_dir = |rc: &[DMatrix<f64>]| -> Direction {
            let mut rcp = Vec::with_capacity(nb);
            let mut dmats = Vec::with_capacity(nb);
            let mut tmp = Vec::with_capacity(nb);
            for j in 0..nb {
                let s = &scal[j];
                let n = s.v.len();
                let d = DMatrix::from_fn(n, n, |a, b| 2.0 * rc[j][(a, b)] / (s.v[a] + s.v[b]));
                let mut r = &s.t * &d * s.t.transpose();
                symmetrize(&mut r);
                tmp.push(&r - &s.w * &rd[j] * &s.w);
                rcp.push(r);
                dmats.push(d);
            }
            let atmp = data.op(&tmp);
            let rhs = DVector::from_iterator(m, rp.iter().zip(&atmp).map(|(a, b)| a - b));
            let mut dy = chol.solve(&rhs);
            // iterative refinement against the unregularized Schur matrix
            for _ in 0..2 {
                let res = &rhs - &schur * &dy;
                dy += chol.solve(&res);
            }
            let dyv: Vec<f64> = dy.iter().copied().collect();
            let ady = data.adj(&dyv);
            let mut dx = Vec::with_capacity(nb);
            let mut dz = Vec::with_capacity(nb);
            let mut sx = Vec::with_capacity(nb);
            let mut sz = Vec::with_capacity(nb);
            for j in 0..nb {
                let s = &scal[j];
                let dzj = &rd[j] - &ady[j];
                let mut dxj = &rcp[j] - &s.w * &dzj * &s.w;
                symmetrize(&mut dxj);
                let mut szj = s.t.transpose() * &dzj * &s.t;
                symmetrize(&mut szj);
                sx.push(&dmats[j] - &szj);
                sz.push(szj);
                dx.push(dxj);
                dz.push(dzj);
            }
            Direction { dx, dy: dyv, dz, sx, sz }
        };

        let steps = |dir: &Direction| {
            let mut ap = f64::INFINITY;
            let mut ad = f64::INFINITY;
            for j in 0..nb {
                ap = ap.min(max_step(&scal[j].v, &dir.sx[j]));
                ad = ad.min(max_step(&scal[j].v, &dir.sz[j]));
            }
            (ap, ad)
        };

        // predictor
        let rc_pred: Vec<DMatrix<f64>> =
            scal.iter().map(|s| DMatrix::from_diagonal(&s.v.map(|v| -v * v))).collect();
        let pred = solve_dir(&rc_pred);
        let (ap, ad) = steps(&pred);
        let (ap, ad) = (ap.min(1.0), ad.min(1.0));
        let mut xz_pred = 0.0;
        for j in 0..nb {
            let xn = &xs[j] + &pred.dx[j] * ap;
            let zn = &zs[j] + &pred.dz[j] * ad;
            xz_pred += inner(&xn, &zn);
        }
        let mu_pred = (xz_pred / n_total as f64).max(0.0);
        let expon = 1f64.max(3.0 * ap.min(ad).powi(2));
        let sigma = (mu_pred / mu).powf(expon).min(1.0);

        // corrector
        let rc_corr: Vec<DMatrix<f64>> = (0..nb)
            .map(|j| {
                let s = &scal[j];
                let mut r = DMatrix::from_diagonal(&s.v.map(|v| sigma * mu - v * v));
                let prod = &pred.sx[j] * &pred.sz[j];
                r -= (&prod + prod.transpose()) * 0.5;
                r
            })
            .collect();
        let dir = solve_dir(&rc_corr);
        let (mut ap, mut ad) = steps(&dir);
        ap = (cfg.step * ap).min(1.0);
        ad = (cfg.step * ad).min(1.0);

        // the step-length formula works in scaled coordinates; shorten the
        // step until both iterates factor in the original ones
        let advance = |base: &[DMatrix<f64>], d: &[DMatrix<f64>], a: f64| -> Vec<DMatrix<f64>> {
            base.iter()
                .zip(d)
                .map(|(m, dm)| {
                    let mut out = m + dm * a;
                    symmetrize(&mut out);
                    out
                })
                .collect()
        };
        let factors = |ms: &[DMatrix<f64>]| ms.iter().all(|m| Cholesky::new(m.clone()).is_some());
        let mut xn = advance(&xs, &dir.dx, ap);
        for _ in 0..30 {
            if factors(&xn) {
                break;
            }
            ap *= 0.8;
            xn = advance(&xs, &dir.dx, ap);
        }
        let mut zn = advance(&zs, &dir.dz, ad);
        for _ in 0..30 {
            if factors(&zn) {
                break;
            }
            ad *= 0.8;
            zn = advance(&zs, &dir.dz, ad);
        }
        xs = xn;
        zs = zn;
        for (yk, d) in y.iter_mut().zip(&dir.dy) {
            *yk += ad * d;
        }

        if cfg.verbose {
            eprintln!(
                "{:4} {:10.3e} {:+.10e} {:+.10e} {:.3}",
                iter,
                ms.gap,
                -ms.dobj,
                -ms.pobj,
                ap.min(ad)
            );
        }
        if ap.min(ad) < 1e-9 {
            stalls += 1;
            if stalls >= 3 {
                break;
            }
        } else {
            stalls = 0;
        }
    }

    let (_, y, xs) = best.expect("at least one iterate");
    Outcome { y, xs, status, iterations }
}

/// `C • X` for a primal iterate, giving the lower bound `−C•X`.
pub(crate) fn primal_objective(data: &Data, xs: &[DMatrix<f64>]) -> f64 {
    data.blocks.iter().zip(xs).map(|(b, x)| inner(&b.c, x)).sum()
}

/// `‖A(X) − c‖ / (1 + ‖c‖)`.
pub(crate) fn primal_infeasibility(data: &Data, xs: &[DMatrix<f64>]) -> f64 {
    let c_norm = data.c_vec.iter().map(|v| v * v).sum::<f64>().sqrt();
    let ax = data.op(xs);
    ax.iter().zip(&data.c_vec).map(|(a, c)| (a - c).powi(2)).sum::<f64>().sqrt() / (1.0 + c_norm)
}

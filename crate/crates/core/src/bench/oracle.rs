use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::poly::{ComplexPoly, ComplexPop, ConstraintKind, RealPoly, RealPop};

/// Exact minimum of `f` over `{±1}^n` by enumeration.
pub fn oracle_binary(f: &RealPoly, n: usize) -> Result<f64> {
    if n > 20 {
        return Err(Error::InvalidParameter(format!("enumeration over 2^{n} points refused (n > 20)")));
    }
    let total = 1usize << n;
    let values = par::map_indices(total, total >= 4096, |code| {
        let x: Vec<f64> = (0..n).map(|i| if code >> i & 1 == 1 { -1.0 } else { 1.0 }).collect();
        f.eval(&x).expect("dimension checked")
    });
    Ok(values.into_iter().fold(f64::INFINITY, f64::min))
}

/// Settings of the multistart local search.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultistartConfig {
    pub restarts: usize,
    pub seed: u64,
    pub max_iter: usize,
    /// Feasibility required of a reported point.
    pub feastol: f64,
    pub parallel: bool,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        Self { restarts: 64, seed: 0, max_iter: 3000, feastol: 1e-9, parallel: true }
    }
}

/// Best point found by the multistart search, in the problem's own sense.
#[derive(Clone, Debug, PartialEq)]
pub struct MultistartResult {
    pub value: f64,
    pub point: Vec<f64>,
    /// Starts that ended at a feasible point.
    pub feasible_runs: usize,
}

/// Smooth problem over `R^d`: objective to minimize and constraints, each
/// returning value and gradient.
trait Smooth: Sync {
    fn dim(&self) -> usize;
    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>);
    fn constraints(&self, x: &[f64]) -> Vec<(ConstraintKind, f64, Vec<f64>)>;
}

struct RealSmooth<'a> {
    f: RealPoly,
    grad: Vec<RealPoly>,
    cons: Vec<(ConstraintKind, &'a RealPoly, Vec<RealPoly>)>,
}

impl<'a> RealSmooth<'a> {
    fn new(pop: &'a RealPop) -> Self {
        let f = pop.min_objective();
        let grad = (0..pop.n).map(|i| f.derivative(i)).collect();
        let cons = pop
            .constraints
            .iter()
            .map(|c| (c.kind, &c.poly, (0..pop.n).map(|i| c.poly.derivative(i)).collect()))
            .collect();
        Self { f, grad, cons }
    }
}

fn eval_real(p: &RealPoly, g: &[RealPoly], x: &[f64]) -> (f64, Vec<f64>) {
    (p.eval(x).unwrap(), g.iter().map(|d| d.eval(x).unwrap()).collect())
}

impl Smooth for RealSmooth<'_> {
    fn dim(&self) -> usize {
        self.grad.len()
    }
    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>) {
        eval_real(&self.f, &self.grad, x)
    }
    fn constraints(&self, x: &[f64]) -> Vec<(ConstraintKind, f64, Vec<f64>)> {
        self.cons
            .iter()
            .map(|(k, p, g)| {
                let (v, d) = eval_real(p, g, x);
                (*k, v, d)
            })
            .collect()
    }
}

/// Complex problem in the real coordinates `(Re z, Im z)`.
struct ComplexSmooth<'a> {
    n: usize,
    f: ComplexPoly,
    grad: Vec<ComplexPoly>,
    cons: Vec<(ConstraintKind, &'a ComplexPoly, Vec<ComplexPoly>)>,
}

impl<'a> ComplexSmooth<'a> {
    fn new(pop: &'a ComplexPop) -> Self {
        let f = pop.min_objective();
        let grad = (0..pop.n).map(|i| f.derivative(i)).collect();
        let cons = pop
            .constraints
            .iter()
            .map(|c| (c.kind, &c.poly, (0..pop.n).map(|i| c.poly.derivative(i)).collect()))
            .collect();
        Self { n: pop.n, f, grad, cons }
    }

    fn point(&self, x: &[f64]) -> Vec<Complex64> {
        (0..self.n).map(|i| Complex64::new(x[i], x[self.n + i])).collect()
    }

    // For real-valued f, df = 2 Re(∂f/∂z dz): ∂/∂Re z = 2 Re g, ∂/∂Im z = -2 Im g.
    fn eval(&self, p: &ComplexPoly, g: &[ComplexPoly], z: &[Complex64]) -> (f64, Vec<f64>) {
        let mut grad = vec![0.0; 2 * self.n];
        for (i, d) in g.iter().enumerate() {
            let w = d.eval(z).unwrap();
            grad[i] = 2.0 * w.re;
            grad[self.n + i] = -2.0 * w.im;
        }
        (p.eval_real(z).unwrap(), grad)
    }
}

impl Smooth for ComplexSmooth<'_> {
    fn dim(&self) -> usize {
        2 * self.n
    }
    fn objective(&self, x: &[f64]) -> (f64, Vec<f64>) {
        self.eval(&self.f, &self.grad, &self.point(x))
    }
    fn constraints(&self, x: &[f64]) -> Vec<(ConstraintKind, f64, Vec<f64>)> {
        let z = self.point(x);
        self.cons
            .iter()
            .map(|(k, p, g)| {
                let (v, d) = self.eval(p, g, &z);
                (*k, v, d)
            })
            .collect()
    }
}

/// Equalities and violated or active inequalities, as `(value, gradient)`.
fn active(problem: &dyn Smooth, x: &[f64], margin: f64) -> Vec<(f64, Vec<f64>)> {
    problem
        .constraints(x)
        .into_iter()
        .filter(|(k, v, _)| *k == ConstraintKind::Eq || *v <= margin)
        .map(|(_, v, d)| (v, d))
        .collect()
}

fn violation(problem: &dyn Smooth, x: &[f64]) -> f64 {
    problem
        .constraints(x)
        .into_iter()
        .map(|(k, v, _)| match k {
            ConstraintKind::Eq => v.abs(),
            ConstraintKind::Ge => (-v).max(0.0),
        })
        .fold(0.0, f64::max)
}

fn jacobian(rows: &[(f64, Vec<f64>)], d: usize) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), d, |r, c| rows[r].1[c])
}

/// Minimum-norm Gauss-Newton restoration onto the active constraints.
fn restore(problem: &dyn Smooth, mut x: Vec<f64>, feastol: f64) -> Option<Vec<f64>> {
    let d = problem.dim();
    for _ in 0..60 {
        if violation(problem, &x) <= feastol * 1e-2 {
            return Some(x);
        }
        let rows: Vec<(f64, Vec<f64>)> = problem
            .constraints(&x)
            .into_iter()
            .filter(|(k, v, _)| *k == ConstraintKind::Eq || *v < 0.0)
            .map(|(_, v, g)| (v, g))
            .collect();
        let j = jacobian(&rows, d);
        let h = DVector::from_iterator(rows.len(), rows.iter().map(|r| r.0));
        let jjt = &j * j.transpose() + DMatrix::identity(rows.len(), rows.len()) * 1e-14;
        let step = j.transpose() * jjt.lu().solve(&h)?;
        for (xi, s) in x.iter_mut().zip(step.iter()) {
            *xi -= s;
        }
        if x.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    (violation(problem, &x) <= feastol).then_some(x)
}

/// Negative gradient projected onto the tangent space of the active constraints.
fn tangent_descent(problem: &dyn Smooth, x: &[f64], g: &[f64]) -> Vec<f64> {
    let d = problem.dim();
    let rows = active(problem, x, 1e-9);
    let g = DVector::from_column_slice(g);
    if rows.is_empty() {
        return (-g).as_slice().to_vec();
    }
    let j = jacobian(&rows, d);
    let jjt = &j * j.transpose() + DMatrix::identity(rows.len(), rows.len()) * 1e-14;
    let proj = match jjt.lu().solve(&(&j * &g)) {
        Some(mu) => &g - j.transpose() * mu,
        None => g,
    };
    (-proj).as_slice().to_vec()
}

/// One projected-gradient descent with Armijo backtracking and restoration
/// after every step.
fn descend(problem: &dyn Smooth, x0: Vec<f64>, cfg: &MultistartConfig) -> Option<(f64, Vec<f64>)> {
    let mut x = restore(problem, x0, cfg.feastol)?;
    let (mut fx, mut g) = problem.objective(&x);
    let mut t: f64 = 1.0;
    for _ in 0..cfg.max_iter {
        let dir = tangent_descent(problem, &x, &g);
        let slope: f64 = dir.iter().map(|v| v * v).sum();
        if slope.sqrt() < 1e-11 * fx.abs().max(1.0) {
            break;
        }
        t = (t * 2.0).min(1e3);
        let mut accepted = false;
        while t > 1e-16 {
            let trial: Vec<f64> = x.iter().zip(&dir).map(|(a, b)| a + t * b).collect();
            if let Some(y) = restore(problem, trial, cfg.feastol) {
                let (fy, gy) = problem.objective(&y);
                if fy <= fx - 1e-4 * t * slope {
                    x = y;
                    fx = fy;
                    g = gy;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (violation(problem, &x) <= cfg.feastol).then_some((fx, x))
}

fn multistart(problem: &dyn Smooth, cfg: &MultistartConfig) -> Option<(f64, Vec<f64>, usize)> {
    let d = problem.dim();
    let runs = par::map_indices(cfg.restarts, cfg.parallel, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(k as u64));
        let x0: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        descend(problem, x0, cfg)
    });
    let feasible = runs.iter().filter(|r| r.is_some()).count();
    runs.into_iter()
        .flatten()
        .min_by(|a, b| a.0.total_cmp(&b.0))
        .map(|(v, x)| (v, x, feasible))
}

/// Best local minimum of a real problem; an upper bound on its infimum
/// (lower bound on the supremum for maximization).
pub fn oracle_multistart_real(pop: &RealPop, cfg: &MultistartConfig) -> Result<MultistartResult> {
    let (v, point, feasible_runs) = multistart(&RealSmooth::new(pop), cfg)
        .ok_or_else(|| Error::InvalidParameter("multistart found no feasible point".into()))?;
    Ok(MultistartResult { value: pop.report_bound(v), point, feasible_runs })
}

/// As [`oracle_multistart_real`] for complex problems; `point` holds
/// `(Re z, Im z)` concatenated.
pub fn oracle_multistart_complex(pop: &ComplexPop, cfg: &MultistartConfig) -> Result<MultistartResult> {
    let (v, point, feasible_runs) = multistart(&ComplexSmooth::new(pop), cfg)
        .ok_or_else(|| Error::InvalidParameter("multistart found no feasible point".into()))?;
    Ok(MultistartResult { value: pop.report_bound(v), point, feasible_runs })
}

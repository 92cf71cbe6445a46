use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{
    monomial_basis, monomial_basis_in, AnyPop, ComplexPoly, ComplexPop, Constraint, Exponent, Pop,
    RealPoly, RealPop,
};

/// Instance families of the benchmark suite.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    BinaryQuadratic,
    UnitnormComplexQuadratic,
    ComplexQuarticSphere,
    MultiSphere,
    Mordell,
}

impl Family {
    pub const ALL: [Family; 5] = [
        Family::BinaryQuadratic,
        Family::UnitnormComplexQuadratic,
        Family::ComplexQuarticSphere,
        Family::MultiSphere,
        Family::Mordell,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::BinaryQuadratic => "binary-quadratic",
            Family::UnitnormComplexQuadratic => "unitnorm-complex-quadratic",
            Family::ComplexQuarticSphere => "complex-quartic-sphere",
            Family::MultiSphere => "multi-sphere",
            Family::Mordell => "mordell",
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown instance family `{s}`")))
    }
}

/// `size` is `n` for every family except multi-sphere, where it is `l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub family: Family,
    pub size: usize,
    pub seed: u64,
}

/// A generated problem with the cliques it was built around, if any.
#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub problem: AnyPop,
    pub cliques: Option<Vec<Vec<usize>>>,
}

pub fn generate(spec: InstanceSpec) -> Result<Instance> {
    let (problem, cliques) = match spec.family {
        Family::BinaryQuadratic => (AnyPop::Real(gen_binary_quadratic(spec.size, spec.seed)?), None),
        Family::UnitnormComplexQuadratic => {
            (AnyPop::Complex(gen_unitnorm_complex_quadratic(spec.size, spec.seed)?), None)
        }
        Family::ComplexQuarticSphere => {
            (AnyPop::Complex(gen_complex_quartic_sphere(spec.size, spec.seed)?), None)
        }
        Family::MultiSphere => {
            let (pop, cliques) = gen_multisphere(spec.size, spec.seed)?;
            (AnyPop::Complex(pop), Some(cliques))
        }
        Family::Mordell => (AnyPop::Complex(mordell_instance(spec.size)?), None),
    };
    Ok(Instance { spec, problem, cliques })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("instance size must be at least 1".into()));
    }
    Ok(())
}

/// Symmetric matrix with upper-triangle entries uniform on `[0, 1]`, drawn row by row.
fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<f64>> {
    let mut q = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let v = rng.gen_range(0.0..1.0);
            q[i][j] = v;
            q[j][i] = v;
        }
    }
    q
}

/// Hermitian matrix: upper-triangle real and imaginary parts uniform on
/// `[0, 1]` (drawn in that order), real diagonal.
fn random_hermitian(rng: &mut ChaCha8Rng, d: usize) -> Vec<Vec<Complex64>> {
    let mut q = vec![vec![Complex64::new(0.0, 0.0); d]; d];
    for i in 0..d {
        for j in i..d {
            let re = rng.gen_range(0.0..1.0);
            let im = if i == j { 0.0 } else { rng.gen_range(0.0..1.0) };
            q[i][j] = Complex64::new(re, im);
            q[j][i] = Complex64::new(re, -im);
        }
    }
    q
}

/// `[x]^* Q [x]` over the given basis.
fn hermitian_form(n: usize, basis: &[Exponent], q: &[Vec<Complex64>]) -> ComplexPoly {
    let mut f = ComplexPoly::zero(n);
    for (p, ap) in basis.iter().enumerate() {
        for (r, ar) in basis.iter().enumerate() {
            f.add_term(ar.clone(), ap.clone(), q[p][r]);
        }
    }
    f
}

/// `|x_i|² + … - 1` over the listed variables.
fn sphere(n: usize, vars: &[usize], radius_sq: f64) -> ComplexPoly {
    let mut g = ComplexPoly::constant(n, -radius_sq);
    for &i in vars {
        g = &g + &ComplexPoly::abs_sq(n, i);
    }
    g
}

/// `min [x]_1ᵀ Q [x]_1` subject to `x_i² = 1`.
pub fn gen_binary_quadratic(n: usize, seed: u64) -> Result<RealPop> {
    check_size(n)?;
    let q = random_symmetric(&mut rng(seed), n + 1);
    let basis = monomial_basis(n, 1);
    let mut f = RealPoly::zero(n);
    for (p, ap) in basis.iter().enumerate() {
        for (r, ar) in basis.iter().enumerate() {
            f.add_term(ap.add(ar), q[p][r]);
        }
    }
    let cons = (0..n)
        .map(|i| {
            let x = RealPoly::var(n, i);
            Constraint::eq(&(&x * &x) - &RealPoly::constant(n, 1.0))
        })
        .collect();
    Ok(Pop::new(f, cons))
}

/// `min [x]_1^* Q [x]_1` subject to `|x_i|² = 1`.
pub fn gen_unitnorm_complex_quadratic(n: usize, seed: u64) -> Result<ComplexPop> {
    check_size(n)?;
    let q = random_hermitian(&mut rng(seed), n + 1);
    let f = hermitian_form(n, &monomial_basis(n, 1), &q);
    let cons = (0..n).map(|i| Constraint::eq(sphere(n, &[i], 1.0))).collect();
    Ok(Pop::new(f, cons))
}

/// `min [x]_2^* Q [x]_2` subject to `‖x‖² = 1`.
pub fn gen_complex_quartic_sphere(n: usize, seed: u64) -> Result<ComplexPop> {
    check_size(n)?;
    let basis = monomial_basis(n, 2);
    let q = random_hermitian(&mut rng(seed), basis.len());
    let f = hermitian_form(n, &basis, &q);
    let all: Vec<usize> = (0..n).collect();
    Ok(Pop::new(f, vec![Constraint::eq(sphere(n, &all, 1.0))]))
}

/// `min Σ_i [x_i]_2^* Q_i [x_i]_2` subject to `‖x_i‖² = 1`, with `n = 4l + 2`
/// and blocks `x_i = (x_{4i}, …, x_{4i+5})` (0-based), so consecutive blocks
/// share two variables. Returns the problem and its blocks.
pub fn gen_multisphere(l: usize, seed: u64) -> Result<(ComplexPop, Vec<Vec<usize>>)> {
    check_size(l)?;
    let n = 4 * l + 2;
    let mut rng = rng(seed);
    let cliques: Vec<Vec<usize>> = (0..l).map(|i| (4 * i..4 * i + 6).collect()).collect();
    let mut f = ComplexPoly::zero(n);
    for cl in &cliques {
        let basis = monomial_basis_in(n, cl, 2);
        let q = random_hermitian(&mut rng, basis.len());
        f = &f + &hermitian_form(n, &basis, &q);
    }
    let cons = cliques.iter().map(|cl| Constraint::eq(sphere(n, cl, 1.0))).collect();
    Ok((Pop::new(f, cons), cliques))
}

/// Mordell's inequality for `n ∈ {3, 4}` with `z_n` eliminated:
/// maximize `Π_{i<j<n} |z_i - z_j|² · Π_{i<n} |z_i + s|²`, `s = z_1 + … + z_{n-1}`,
/// subject to `Σ |z_i|² + |s|² = n`.
pub fn mordell_instance(n: usize) -> Result<ComplexPop> {
    if !(3..=4).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "the Mordell instance is defined for n = 3 or 4, got {n}"
        )));
    }
    let m = n - 1;
    let z = |i| ComplexPoly::var(m, i);
    let abs_sq = |p: &ComplexPoly| p * &p.conjugate();
    let mut s = ComplexPoly::zero(m);
    for i in 0..m {
        s = &s + &z(i);
    }
    let mut f = ComplexPoly::constant(m, 1.0);
    for i in 0..m {
        for j in i + 1..m {
            f = &f * &abs_sq(&(&z(i) - &z(j)));
        }
    }
    for i in 0..m {
        f = &f * &abs_sq(&(&z(i) + &s));
    }
    let mut g = &abs_sq(&s) - &ComplexPoly::constant(m, n as f64);
    for i in 0..m {
        g = &g + &ComplexPoly::abs_sq(m, i);
    }
    Ok(Pop::new(f, vec![Constraint::eq(g)]).maximize())
}

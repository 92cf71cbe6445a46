//! Acceptance suite: one PASS/FAIL line per criterion. Everything runs
//! single-threaded so timings are comparable across machines.

use std::time::Instant;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use shiftsdp::bench::{
    gen_binary_quadratic, gen_multisphere, gen_unitnorm_complex_quadratic, mordell_instance,
    oracle_binary, oracle_multistart_complex, MultistartConfig,
};
use shiftsdp::extract::{
    build_shift_operators, check_symmetry, commutator_norm, extract_atoms, grammian_factor,
    moments_of, numeric_moment_matrix, AtomicMeasure, DEFAULT_RANK_TOL,
};
use shiftsdp::ipm::{solve, SolverConfig};
use shiftsdp::moment::real_shift_block;
use shiftsdp::pipeline::{
    prepare, solve_relaxation, AnyRelaxation, PipelineOptions, RelaxationSpec, SolveReport,
};
use shiftsdp::poly::{binomial, AnyPop, Constraint, Exponent, Pop, RealPoly};
use shiftsdp::sdp::{
    evaluate, parse_sdpa, realify_hermitian, to_sdpa_string, BlockKind, LmiBlock, LmiProblem,
    Status,
};
use shiftsdp::structure::StructureMode;

struct Outcome {
    pass: bool,
    detail: String,
}

fn solver() -> SolverConfig {
    SolverConfig { parallel: false, ..SolverConfig::default() }
}

fn options() -> PipelineOptions {
    PipelineOptions { solver: solver(), extract: None, ..PipelineOptions::default() }
}

fn multistart(restarts: usize, seed: u64) -> MultistartConfig {
    MultistartConfig { restarts, seed, parallel: false, ..MultistartConfig::default() }
}

/// `a ≤ b` up to `slack · max(1, |b|)`.
fn leq(a: f64, b: f64, slack: f64) -> bool {
    a <= b + slack * b.abs().max(1.0)
}

fn run(problem: &AnyPop, spec: RelaxationSpec) -> SolveReport {
    solve_relaxation(problem, &spec, &options()).expect("relaxation builds")
}

/// Every LMI generated while checking criteria 1-4, for the codec check.
struct Collected(Vec<LmiProblem>);

impl Collected {
    fn add(&mut self, problem: &AnyPop, spec: &RelaxationSpec) {
        self.0.push(prepare(problem, spec).expect("relaxation builds").lmi);
    }
}

fn mordell(seen: &mut Collected) -> Outcome {
    let p = AnyPop::Complex(mordell_instance(3).unwrap());
    let cases = [
        ("S-LAS(3,2)", RelaxationSpec::slas(3, 2), 27.000, 1e-3),
        ("S-LAS(3,0)", RelaxationSpec::slas(3, 0), 54.000, 1e-3),
        ("LAS(4)", RelaxationSpec::las(4), 27.347, 5e-2),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (name, spec, target, tol) in cases {
        seen.add(&p, &spec);
        let t = Instant::now();
        let rep = run(&p, spec);
        let secs = t.elapsed().as_secs_f64();
        let ok = (rep.bound - target).abs() <= tol && secs < 60.0;
        pass &= ok;
        parts.push(format!(
            "{name} {:.4} (target {target}, {}, {secs:.2}s){}",
            rep.bound,
            rep.status,
            if ok { "" } else { " MISS" }
        ));
    }
    Outcome { pass, detail: parts.join("; ") }
}

fn binary_exactness() -> Outcome {
    let t = Instant::now();
    let mut worst = 0.0f64;
    let mut failures = 0;
    for n in [4, 6, 8] {
        for seed in 0..5 {
            let pop = gen_binary_quadratic(n, seed).unwrap();
            let exact = oracle_binary(&pop.objective, n).unwrap();
            let rep = run(&AnyPop::Real(pop), RelaxationSpec::las(2));
            let err = (rep.bound - exact).abs();
            worst = worst.max(err);
            if err > 1e-5 || rep.status != Status::Optimal {
                failures += 1;
            }
        }
    }
    let secs = t.elapsed().as_secs_f64();
    Outcome {
        pass: failures == 0 && secs < 120.0,
        detail: format!("15 instances, {failures} mismatches, worst |rho_2 - oracle| {worst:.2e}, {secs:.2}s"),
    }
}

fn binary_chain(seen: &mut Collected) -> Outcome {
    let mut violations = Vec::new();
    for k in 0..10u64 {
        let n = 2 + (k as usize % 5);
        let pop = gen_binary_quadratic(n, 100 + k).unwrap();
        let exact = oracle_binary(&pop.objective, n).unwrap();
        let p = AnyPop::Real(pop);
        let specs = [RelaxationSpec::las(1), RelaxationSpec::slas(1, 1), RelaxationSpec::las(2)];
        let vals: Vec<f64> = specs
            .into_iter()
            .map(|s| {
                seen.add(&p, &s);
                run(&p, s).bound
            })
            .collect();
        let ok = leq(vals[0], vals[1], 1e-6) && leq(vals[1], vals[2], 1e-6) && leq(vals[2], exact, 1e-6);
        if !ok {
            violations.push(format!("n={n} {vals:?} oracle {exact}"));
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: if violations.is_empty() {
            "10 instances, rho_1 <= rho'_1 <= rho_2 <= enumeration everywhere".into()
        } else {
            violations.join("; ")
        },
    }
}

fn complex_chain(seen: &mut Collected) -> Outcome {
    let mut violations = Vec::new();
    let mut worst_gap = 0.0f64;
    for k in 0..10u64 {
        let n = 1 + (k as usize % 4);
        let pop = gen_unitnorm_complex_quadratic(n, 200 + k).unwrap();
        let oracle = oracle_multistart_complex(&pop, &multistart(32, k)).unwrap().value;
        let p = AnyPop::Complex(pop);
        let specs = [RelaxationSpec::las(1), RelaxationSpec::slas(1, 0), RelaxationSpec::slas(1, 1)];
        let vals: Vec<f64> = specs
            .into_iter()
            .map(|s| {
                seen.add(&p, &s);
                run(&p, s).bound
            })
            .collect();
        let gap = (vals[2] - oracle).abs();
        worst_gap = worst_gap.max(gap);
        let ok = leq(vals[0], vals[1], 1e-6)
            && leq(vals[1], vals[2], 1e-6)
            && leq(vals[2], oracle, 1e-6)
            && gap <= 1e-4 * oracle.abs().max(1.0);
        if !ok {
            violations.push(format!("n={n} {vals:?} oracle {oracle}"));
        }
    }
    Outcome {
        pass: violations.is_empty(),
        detail: format!(
            "10 instances, {} violations, worst |tau'_(1,1) - multistart| {worst_gap:.2e}{}",
            violations.len(),
            if violations.is_empty() { String::new() } else { format!(": {}", violations.join("; ")) }
        ),
    }
}

fn shift_blocks_psd() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = f64::INFINITY;
    for _ in 0..100 {
        let n = rng.gen_range(1..=3);
        let r = rng.gen_range(1..=3);
        let s = rng.gen_range(0..r);
        let t = rng.gen_range(1..=5);
        let mu = AtomicMeasure::<f64>::random(&mut rng, n, t);
        let y = moments_of(&mu, 2 * r);
        for i in 0..n {
            let m = real_shift_block(n, i, s).instantiate(|k| y.value(k));
            let e = SymmetricEigen::new(m).eigenvalues.min();
            worst = worst.min(e);
        }
    }
    Outcome { pass: worst >= -1e-8, detail: format!("100 measures, smallest eigenvalue {worst:.2e}") }
}

/// `t` atoms in `[-1, 1]^n` at pairwise distance at least `sep`.
fn separated_atoms(rng: &mut ChaCha8Rng, n: usize, t: usize, sep: f64) -> Vec<Vec<f64>> {
    loop {
        let atoms: Vec<Vec<f64>> =
            (0..t).map(|_| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
        let ok = (0..t).all(|a| (0..a).all(|b| dist(&atoms[a], &atoms[b]) >= sep));
        if ok {
            return atoms;
        }
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

fn set_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let one_way = |a: &[Vec<f64>], b: &[Vec<f64>]| {
        a.iter().map(|p| b.iter().map(|q| dist(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn shift_operator_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut sym, mut comm, mut recov, mut spec) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut failures = 0;
    for trial in 0..50u64 {
        let n = rng.gen_range(1..=3);
        let t = rng.gen_range(1..=4);
        let atoms = separated_atoms(&mut rng, n, t, 0.2);
        let weights: Vec<f64> = (0..t).map(|_| rng.gen_range(0.2..1.0)).collect();
        let mu = AtomicMeasure::new(atoms.clone(), weights).unwrap();
        // smallest order whose unshifted columns can carry t atoms
        let r = (1..).find(|&r| binomial(n + r - 1, n) >= t).unwrap();
        let y = moments_of(&mu, 2 * r);
        let m = numeric_moment_matrix(&y, n, r);
        let result = grammian_factor(&m, DEFAULT_RANK_TOL)
            .and_then(|(_, a)| build_shift_operators(&a, n, r, DEFAULT_RANK_TOL))
            .and_then(|ops| extract_atoms(&ops, trial).map(|found| (ops, found)));
        let Ok((ops, found)) = result else {
            failures += 1;
            continue;
        };
        sym = ops.ops.iter().map(check_symmetry).fold(sym, f64::max);
        comm = comm.max(commutator_norm(&ops.ops));
        recov = recov.max(if found.len() == t { set_distance(&atoms, &found) } else { f64::INFINITY });
        for (i, op) in ops.ops.iter().enumerate() {
            let eig = sorted(SymmetricEigen::new((op + op.transpose()) * 0.5).eigenvalues.iter().copied().collect());
            let coords = sorted(atoms.iter().map(|a| a[i]).collect());
            let d = eig.iter().zip(&coords).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            spec = spec.max(if eig.len() == coords.len() { d } else { f64::INFINITY });
        }
    }
    Outcome {
        pass: failures == 0 && sym <= 1e-8 && comm <= 1e-8 && recov <= 1e-6 && spec <= 1e-6,
        detail: format!(
            "50 measures, {failures} failures, symmetry {sym:.1e}, commutators {comm:.1e}, \
             recovery {recov:.1e}, spectra {spec:.1e}"
        ),
    }
}

fn realification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut spectrum = 0.0f64;
    for _ in 0..100 {
        let a = DMatrix::from_fn(5, 5, |_, _| {
            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        let h = (&a + a.adjoint()) * Complex64::new(0.5, 0.0);
        let complex = SymmetricEigen::new(h.clone()).eigenvalues;
        let doubled = sorted(complex.iter().flat_map(|&v| [v, v]).collect());
        let real = sorted(SymmetricEigen::new(realify_hermitian(&h)).eigenvalues.iter().copied().collect());
        let d = doubled.iter().zip(&real).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        spectrum = spectrum.max(d);
    }

    let mut objective = 0.0f64;
    let mut infeasible = 0;
    for k in 0..100u64 {
        let n = 1 + (k as usize % 3);
        let pop = gen_unitnorm_complex_quadratic(n, 300 + k).unwrap();
        let spec = if k % 2 == 0 { RelaxationSpec::las(1) } else { RelaxationSpec::slas(1, 1) };
        let prepared = prepare(&AnyPop::Complex(pop.clone()), &spec).unwrap();
        let AnyRelaxation::Complex(rel) = &prepared.relaxation else { unreachable!() };
        let t = rng.gen_range(1..=3);
        let atoms: Vec<Vec<Complex64>> = (0..t)
            .map(|_| (0..n).map(|_| Complex64::from_polar(1.0, rng.gen_range(-3.2..3.2))).collect())
            .collect();
        let weights: Vec<f64> = (0..t).map(|_| rng.gen_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        let weights: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let mu = AtomicMeasure::new(atoms.clone(), weights.clone()).unwrap();
        let y = moments_of(&mu, 2);
        let x = prepared.map.point_from_moments(|idx| {
            let v = y.value(&rel.catalog[idx]);
            (v.re, v.im)
        });
        let sol = evaluate(&prepared.lmi, &x, 1e-9).unwrap();
        if sol.status != Status::Feasible {
            infeasible += 1;
        }
        let expected: f64 = atoms
            .iter()
            .zip(&weights)
            .map(|(a, w)| w * pop.objective.eval_real(a).unwrap())
            .sum();
        let got = prepared.map.bound(sol.objective);
        objective = objective.max((got - expected).abs() / expected.abs().max(1.0));
    }
    Outcome {
        pass: spectrum <= 1e-10 && infeasible == 0 && objective <= 1e-10,
        detail: format!(
            "spectrum error {spectrum:.1e} over 100 matrices; {infeasible}/100 measures infeasible, \
             objective error {objective:.1e}"
        ),
    }
}

fn sdpa_codec(seen: &Collected) -> Outcome {
    let mismatches = seen
        .0
        .iter()
        .filter(|p| match parse_sdpa(&to_sdpa_string(p)) {
            Ok(q) => !q.structurally_equal(p),
            Err(_) => true,
        })
        .count();
    Outcome {
        pass: !seen.0.is_empty() && mismatches == 0,
        detail: format!("{} problems, {mismatches} mismatches", seen.0.len()),
    }
}

/// Ball-constrained quartic with even support except one `x_0 x_1` term, so
/// the sign group is nontrivial but not the full group.
fn even_quartic(n: usize, rng: &mut ChaCha8Rng) -> Pop<RealPoly> {
    let mut f = RealPoly::zero(n);
    let mut e = vec![0u32; n];
    for i in 0..n {
        e[i] = 4;
        f.add_term(Exponent::new(e.clone()), 1.0);
        e[i] = 2;
        f.add_term(Exponent::new(e.clone()), rng.gen_range(-1.0..1.0));
        for j in i + 1..n {
            e[j] = 2;
            f.add_term(Exponent::new(e.clone()), rng.gen_range(-1.0..1.0));
            e[j] = 0;
        }
        e[i] = 0;
    }
    e[0] = 1;
    e[1] = 1;
    f.add_term(Exponent::new(e), rng.gen_range(-1.0..1.0));
    let mut g = RealPoly::constant(n, 1.0);
    for i in 0..n {
        let x = RealPoly::var(n, i);
        g = &g - &(&x * &x);
    }
    Pop::new(f, vec![Constraint::ge(g)])
}

fn sign_symmetry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0.0f64;
    let mut problems = Vec::new();
    for k in 0..10 {
        let n = 2 + k % 3;
        let p = AnyPop::Real(even_quartic(n, &mut rng));
        let dense = run(&p, RelaxationSpec::las(2));
        let ss = run(&p, RelaxationSpec::las(2).with_structure(StructureMode::Sign));
        let d = (dense.bound - ss.bound).abs() / dense.bound.abs().max(1.0);
        worst = worst.max(d);
        let dense_max = dense.stats.blocks.iter().max().copied().unwrap_or(0);
        let ss_max = ss.stats.blocks.iter().max().copied().unwrap_or(0);
        if d > 1e-6 || ss_max >= dense_max || dense.status != Status::Optimal || ss.status != Status::Optimal {
            problems.push(format!("n={n} dense {} ss {} blocks {dense_max}/{ss_max}", dense.bound, ss.bound));
        }
    }
    Outcome {
        pass: problems.is_empty(),
        detail: format!("10 instances, worst relative difference {worst:.1e}{}", if problems.is_empty() {
            String::new()
        } else {
            format!(": {}", problems.join("; "))
        }),
    }
}

fn correlative_sparsity() -> Outcome {
    let (pop, cliques) = gen_multisphere(2, 0).unwrap();
    let p = AnyPop::Complex(pop.clone());
    let mut las = RelaxationSpec::las(2).with_structure(StructureMode::Cs);
    las.cliques = Some(cliques);
    let slas = RelaxationSpec { s: Some(1), ..las.clone() };
    let t = Instant::now();
    let a = run(&p, las);
    let b = run(&p, slas);
    let secs = t.elapsed().as_secs_f64();
    let oracle = oracle_multistart_complex(&pop, &multistart(16, 0)).unwrap().value;
    let pass = leq(a.bound, b.bound, 1e-6)
        && leq(a.bound, oracle, 1e-6)
        && leq(b.bound, oracle, 1e-6)
        && secs < 120.0
        && a.status == Status::Optimal
        && b.status == Status::Optimal;
    Outcome {
        pass,
        detail: format!(
            "cs LAS {:.6}, cs S-LAS {:.6}, multistart {oracle:.6}, relaxations {secs:.1}s",
            a.bound, b.bound
        ),
    }
}

fn solver_sanity() -> Outcome {
    let mut blk = LmiBlock::new(2, BlockKind::Dense, "x");
    blk.add(None, 0, 1, 1.0);
    blk.add(Some(0), 0, 0, 1.0);
    blk.add(Some(0), 1, 1, 1.0);
    let mut lmi = LmiProblem::new(vec![1.0]);
    lmi.blocks.push(blk);
    let s = solve(&lmi, &solver()).unwrap();

    let n = 2;
    let f = &RealPoly::var(n, 0) * &RealPoly::var(n, 1);
    let one = RealPoly::constant(n, 1.0);
    let cons = (0..n)
        .map(|i| Constraint::eq(&(&RealPoly::var(n, i) * &RealPoly::var(n, i)) - &one))
        .collect();
    let qp = run(&AnyPop::Real(Pop::new(f, cons)), RelaxationSpec::las(1));
    let e1 = (s.objective - 1.0).abs();
    let e2 = (qp.bound + 1.0).abs();
    Outcome {
        pass: e1 <= 1e-7 && e2 <= 1e-7 && s.status == Status::Optimal && qp.status == Status::Optimal,
        detail: format!("2x2 LMI {:.10} ({}), binary QP {:.10} ({})", s.objective, s.status, qp.bound, qp.status),
    }
}

fn main() {
    let mut seen = Collected(Vec::new());
    type Check = Box<dyn FnOnce(&mut Collected) -> Outcome>;
    let criteria: Vec<(&str, Check)> = vec![
        ("Mordell n=3 bounds", Box::new(mordell)),
        ("binary quadratic exactness at r=2", Box::new(|_| binary_exactness())),
        ("real ordering chain", Box::new(binary_chain)),
        ("complex ordering chain", Box::new(complex_chain)),
        ("shift blocks PSD on atomic measures", Box::new(|_| shift_blocks_psd())),
        ("shift-operator suite", Box::new(|_| shift_operator_suite())),
        ("realification", Box::new(|_| realification())),
        ("SDPA round trip", Box::new(|s: &mut Collected| sdpa_codec(s))),
        ("sign symmetry exactness", Box::new(|_| sign_symmetry())),
        ("correlative sparsity on multi-sphere", Box::new(|_| correlative_sparsity())),
        ("embedded solver sanity", Box::new(|_| solver_sanity())),
    ];
    let mut passed = 0;
    let total = criteria.len();
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let out = check(&mut seen);
        passed += out.pass as usize;
        println!("{} {:2} {name}: {}", if out.pass { "PASS" } else { "FAIL" }, k + 1, out.detail);
    }
    println!("{passed}/{total} criteria passed");
}

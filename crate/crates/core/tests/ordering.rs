use proptest::prelude::*;
use shiftsdp::bench::{
    gen_binary_quadratic, gen_complex_quartic_sphere, gen_multisphere, oracle_binary,
    oracle_multistart_complex, MultistartConfig,
};
use shiftsdp::ipm::SolverConfig;
use shiftsdp::pipeline::{solve_relaxation, PipelineOptions, RelaxationSpec};
use shiftsdp::poly::AnyPop;
use shiftsdp::sdp::Status;
use shiftsdp::structure::StructureMode;

const SLACK: f64 = 1e-6;

fn opts() -> PipelineOptions {
    PipelineOptions {
        solver: SolverConfig { parallel: false, ..SolverConfig::default() },
        extract: None,
        ..PipelineOptions::default()
    }
}

fn bound(p: &AnyPop, spec: RelaxationSpec) -> f64 {
    let rep = solve_relaxation(p, &spec, &opts()).unwrap();
    assert_eq!(rep.status, Status::Optimal, "{:?}", rep.spec);
    rep.bound
}

fn assert_chain(values: &[f64]) {
    for w in values.windows(2) {
        assert!(w[0] <= w[1] + SLACK * w[1].abs().max(1.0), "chain broken: {values:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn real_chain(n in 2usize..=5, seed in 0u64..10_000) {
        let pop = gen_binary_quadratic(n, seed).unwrap();
        let exact = oracle_binary(&pop.objective, n).unwrap();
        let p = AnyPop::Real(pop);
        let rho1 = bound(&p, RelaxationSpec::las(1));
        let rho1s = bound(&p, RelaxationSpec::slas(1, 1));
        let rho2 = bound(&p, RelaxationSpec::las(2));
        assert_chain(&[rho1, rho1s, rho2, exact]);
    }

    #[test]
    fn complex_chain(n in 1usize..=2, seed in 0u64..10_000) {
        let pop = gen_complex_quartic_sphere(n, seed).unwrap();
        let cfg = MultistartConfig { restarts: 16, parallel: false, ..MultistartConfig::default() };
        let oracle = oracle_multistart_complex(&pop, &cfg).unwrap().value;
        let p = AnyPop::Complex(pop);
        let tau = bound(&p, RelaxationSpec::las(2));
        let t20 = bound(&p, RelaxationSpec::slas(2, 0));
        let t21 = bound(&p, RelaxationSpec::slas(2, 1));
        let t31 = bound(&p, RelaxationSpec::slas(3, 1));
        assert_chain(&[tau, t20, t21, oracle]);
        assert_chain(&[t21, t31, oracle]);
    }
}

#[test]
fn structure_never_beats_dense() {
    let (pop, cliques) = gen_multisphere(1, 3).unwrap();
    let p = AnyPop::Complex(pop.clone());
    let dense = bound(&p, RelaxationSpec::las(2));
    let mut cs = RelaxationSpec::las(2).with_structure(StructureMode::Cs);
    cs.cliques = Some(cliques);
    let sparse = bound(&p, cs);
    let ss = bound(&p, RelaxationSpec::las(2).with_structure(StructureMode::Sign));
    let cfg = MultistartConfig { restarts: 8, parallel: false, ..MultistartConfig::default() };
    let oracle = oracle_multistart_complex(&pop, &cfg).unwrap().value;
    assert_chain(&[sparse, dense, oracle]);
    assert!((ss - dense).abs() <= SLACK * dense.abs().max(1.0), "{ss} vs {dense}");
}

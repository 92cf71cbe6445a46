use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use shiftsdp::bench::{gen_binary_quadratic, gen_unitnorm_complex_quadratic, oracle_multistart_complex, MultistartConfig};
use shiftsdp::ipm::{solve, SolverConfig};
use shiftsdp::pipeline::{prepare, RelaxationSpec};
use shiftsdp::poly::AnyPop;

fn interior_point(c: &mut Criterion) {
    let mut group = c.benchmark_group("ipm");
    group.sample_size(10);
    for n in [6, 8] {
        let pop = AnyPop::Real(gen_binary_quadratic(n, 0).unwrap());
        let lmi = prepare(&pop, &RelaxationSpec::slas(2, 1)).unwrap().lmi;
        for parallel in [false, true] {
            let cfg = SolverConfig { parallel, ..SolverConfig::default() };
            let label = if parallel { "rayon" } else { "sequential" };
            group.bench_with_input(BenchmarkId::new(label, n), &lmi, |b, lmi| {
                b.iter(|| solve(black_box(lmi), &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn multistart(c: &mut Criterion) {
    let mut group = c.benchmark_group("multistart");
    group.sample_size(10);
    let pop = gen_unitnorm_complex_quadratic(4, 0).unwrap();
    for parallel in [false, true] {
        let cfg = MultistartConfig { restarts: 16, max_iter: 500, parallel, ..MultistartConfig::default() };
        let label = if parallel { "rayon" } else { "sequential" };
        group.bench_function(label, |b| b.iter(|| oracle_multistart_complex(black_box(&pop), &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, interior_point, multistart);
criterion_main!(benches);
